#pragma once

// Linear optimization over the multiplier set: minimize <c, lambda> subject
// to A lambda = b and lambda in a normal cone of Q (Zero, Ray or -Q).

#include "socva/constraint_system.hpp"

#include <optional>

namespace socva {

struct SocLinearProgram {
  Vec c;
  Mat A;  // J' (n x (m+1))
  Vec b;  // x*
  ConeSet cone = ConeSet::zero(1);
};

enum class LpStatus { Optimal, Unbounded, Infeasible };
const char* to_string(LpStatus s);

enum class ArgminKind { None, Singleton, Ray, WholeSet };
const char* to_string(ArgminKind k);

struct DualCertificate {
  Vec z;
  double eps = 0.0;
  double dist = 0.0;     // dist(J z + <v, Hess Phi v>; Q)
  double pairing = 0.0;  // <x*, z> + <v, Hess<lambda, Phi> v>
};

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  bool attained = true;
  ArgminKind kind = ArgminKind::None;
  Vec point;      // Singleton: the minimizer; Ray: the generator (from 0)
  ConeSet argmin = ConeSet::empty(1);
};

LpOutcome solve_lp(const SocLinearProgram& prog);

// Objective of the multiplier program for direction v.
SocLinearProgram multiplier_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v);

// Throws DirectionNotCritical when v is not in K(x, x*).
LpOutcome solve_multiplier_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v);

// epsilon-dual certificate; requires Phi(x) = 0 and an optimal primal.
DualCertificate solve_dual_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v,
                              double eps);

// Test oracle: searches the feasible slice inside a ball by grid refinement
// over boundary directions seen from an interior point.
double brute_force_lp_oracle(const SocLinearProgram& prog, int grid, double radius);

}  // namespace socva
