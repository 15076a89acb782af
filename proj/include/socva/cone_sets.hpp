#pragma once

#include "socva/common.hpp"

#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace socva {

// Closed set algebra produced by the variational formulas. Leaves are
// exact; nodes combine children. Factories apply light structural
// simplification, so `kind()` of a built set may differ from the factory
// name (e.g. ray(0) is Zero).
enum class SetKind {
  Empty,
  Zero,
  All,
  SOC,
  NegSOC,
  Halfspace,          // {u : <u,a> <= 0}
  Hyperplane,         // {u : <u,a> = 0}
  Ray,                // R_+ d
  FinitelyGenerated,  // cone of the columns of G
  Singleton,          // {p}
  LinearImage,        // M C
  Preimage,           // {x : M x in C}
  Sum,                // A + B
  Intersect,          // A n B
  Translate,          // p + C
};

const char* to_string(SetKind k);

class ConeSet {
 public:
  static ConeSet empty(int n);
  static ConeSet zero(int n);
  static ConeSet all(int n);
  static ConeSet soc(int n);
  static ConeSet neg_soc(int n);
  static ConeSet halfspace(const Vec& a);
  static ConeSet hyperplane(const Vec& a);
  static ConeSet ray(const Vec& d);
  static ConeSet generated(const Mat& G);
  static ConeSet singleton(const Vec& p);
  static ConeSet linear_image(const Mat& M, const ConeSet& c);
  static ConeSet preimage(const Mat& M, const ConeSet& c);
  static ConeSet sum(const ConeSet& a, const ConeSet& b);
  static ConeSet intersect(const ConeSet& a, const ConeSet& b);
  static ConeSet translate(const Vec& p, const ConeSet& c);
  // {x : M x = rhs}
  static ConeSet affine_solutions(const Mat& M, const Vec& rhs);
  // The span of the columns of B.
  static ConeSet span(const Mat& B);

  SetKind kind() const;
  int dim() const;
  const Vec& vec() const;  // a / d / p
  const Mat& mat() const;  // M / G
  int num_children() const;
  const ConeSet& child(int i) const;
  bool is_leaf() const;
  // True when no Singleton/Translate offsets appear (the set is a cone).
  bool is_cone() const;

 private:
  struct Node;
  explicit ConeSet(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static ConeSet make(SetKind k, int dim, Vec v, Mat m, std::vector<ConeSet> ch);
  std::shared_ptr<const Node> node_;
};

inline constexpr double kMembershipTol = 1e-8;
// Tolerance for the structural decisions made while simplifying.
inline constexpr double kSimplifyTol = 1e-9;

bool membership(const ConeSet& S, const Vec& v, double tol = kMembershipTol);
// Membership plus a concrete decomposition for Sum(A, B): returns (a, b)
// with a in A, b in B, a + b = v.
std::optional<std::pair<Vec, Vec>> decompose_sum(const ConeSet& S, const Vec& v,
                                                 double tol = kMembershipTol);

ConeSet polar(const ConeSet& S);
ConeSet normal_cone_of(const ConeSet& S, const Vec& v, double tol = kMembershipTol);

// A nonzero element of the cone S, normalized so that its largest
// coordinate (in absolute value) is one; nullopt if S = {0}.
std::optional<Vec> find_nonzero(const ConeSet& S, double tol = kMembershipTol);

bool structurally_equal(const ConeSet& a, const ConeSet& b, double tol = 1e-12);
std::optional<Vec> sample_point(const ConeSet& S, std::mt19937_64& rng);
bool equal_sets(const ConeSet& A, const ConeSet& B, int dim, int samples = 200,
                double tol = kMembershipTol, unsigned seed = 7);

}  // namespace socva
