#pragma once

// Tangent cone to the graph of the normal cone map of Gamma and the
// graphical derivative DN_Gamma, evaluated under an asserted MSCQ.

#include "socva/conic_lp.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace socva {

struct GraphDerivativeResult {
  Vec v;
  bool critical = false;
  LpOutcome argmin_multipliers;
  Mat op;  // column i: (Hess Phi_i + curvature of e_i) v, so affine part = op * lambda
  ConeSet affine_part = ConeSet::empty(1);
  ConeSet normal_part = ConeSet::empty(1);
  ConeSet full_set = ConeSet::empty(1);
  std::vector<Vec> lambdas;  // representative multipliers used
  bool mscq_verified = false;
  std::string note;
};

// kappa, when given, restricts the multipliers to the ball of radius
// kappa * ||x*||.
GraphDerivativeResult graphical_derivative(const SmoothMapOracle& phi, const StationaryPair& pair,
                                           const Vec& v,
                                           std::optional<double> kappa = std::nullopt);

// Closed form for x* = 0: J'[N_Q(Phi(x)) n {J v}-perp].
ConeSet graphical_derivative_zero_star(const SmoothMapOracle& phi, const Vec& x, const Vec& v);

// Splits w in full_set into an affine element and a normal-cone element.
std::optional<std::pair<Vec, Vec>> explain_member(const GraphDerivativeResult& r, const Vec& w,
                                                  double tol = kMembershipTol);

// One face of a polyhedral critical cone with its constant normal cone.
struct Stratum {
  std::string label;
  ConeSet face_closure = ConeSet::zero(1);  // closure of the face
  Vec relint;                               // a point in the relative interior
  ConeSet normal = ConeSet::zero(1);        // N_K on the relative interior
  Mat affine;                               // v* in affine * v + normal
  bool exact = false;                       // affine map valid on the whole face
};

class TangentGraph {
 public:
  TangentGraph(const SmoothMapOracle& phi, StationaryPair pair,
               std::optional<double> kappa = std::nullopt);

  bool contains(const Vec& v, const Vec& v_star, double tol = kMembershipTol) const;
  const ConeSet& critical() const { return K_; }
  // Present only when K is polyhedral in the supported leaf forms.
  const std::optional<std::vector<Stratum>>& strata() const { return strata_; }
  const GraphDerivativeResult& at(const Vec& v) const;

 private:
  const SmoothMapOracle& phi_;
  StationaryPair pair_;
  std::optional<double> kappa_;
  ConeSet K_ = ConeSet::zero(1);
  std::optional<std::vector<Stratum>> strata_;
  mutable std::map<std::vector<double>, GraphDerivativeResult> cache_;
};

// Faces of a polyhedral cone in the leaf forms produced by critical_cone.
std::optional<std::vector<Stratum>> polyhedral_faces(const ConeSet& K);

// Nearest point of gph N_Gamma to (x, x*), as a 2n-vector.
using GraphProjector = std::function<Vec(const Vec& x, const Vec& x_star)>;

// gph N_Gamma for Gamma = {x : <a, x> >= 0}.
GraphProjector halfspace_graph_projector(const Vec& a);

struct TangentSample {
  Vec v;
  Vec v_star;
  double t = 0.0;
};

// Difference quotients of projected perturbations of (x, x*).
std::vector<TangentSample> sample_tangent_oracle(const GraphProjector& proj,
                                                 const StationaryPair& pair, int samples,
                                                 double t_max, unsigned seed = 11);

}  // namespace socva
