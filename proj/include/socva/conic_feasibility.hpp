#pragma once

// Exact small-scale feasibility machinery behind ConeSet membership.
// A set is compiled to a lifted form
//   S = { M z + b : z in K, E z = e },
// with K a product of free, nonnegative and (signed) Lorentz blocks.

#include "socva/common.hpp"

#include <limits>
#include "socva/cone_sets.hpp"

#include <vector>

namespace socva {

enum class BlockKind { Free, NonNeg, Soc };

struct Block {
  BlockKind kind = BlockKind::Free;
  int offset = 0;
  int size = 0;
  double sign = 1.0;  // Soc only: z_block in sign * Q
};

struct Lifted {
  int dim = 0;
  int nvars = 0;
  std::vector<Block> blocks;
  Mat M;
  Vec b;
  Mat E;
  Vec e;
  bool empty = false;
};

Lifted compile(const ConeSet& S);

// sup over y of  sign*(p0 + a0.y) - ||p_r + A_r y||  (the Lorentz margin
// of the affine set p + A y, for the cone sign*Q). Closed form. When the
// sup is finite but not attained, y loses at most slack/2 of it.
struct MarginResult {
  double sup = 0.0;
  bool unbounded = false;
  bool attained = true;
  Vec y;  // a maximizer; for unbounded sup, a point with margin >= 1
};
// When the sup is not attained, y reaches margin min(sup - slack, target).
MarginResult max_soc_margin(const Vec& p, const Mat& A, double sign = 1.0, double slack = 1e-13,
                            double target = std::numeric_limits<double>::infinity());

double soc_margin(const Vec& x, double sign = 1.0);

// Lawson-Hanson nonnegative least squares.
Vec nnls(const Mat& A, const Vec& b, int max_iter = -1);

struct FeasResult {
  bool feasible = false;
  bool exact = true;  // false when the alternating-projection fallback decided
  double residual = 0.0;
  Vec z;
};

// Feasibility of { z in K : E z = e, G z = h }.
FeasResult solve_lifted(const Lifted& L, const Mat& G, const Vec& h, double tol);

Vec project_block(const Block& blk, const Vec& z);

}  // namespace socva
