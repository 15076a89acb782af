#pragma once

// The constraint system {x : Phi(x) in Q}: tangent and normal cones,
// critical cones, multiplier sets, curvature term and CQ checks.

#include "socva/cone_sets.hpp"
#include "socva/soc_geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace socva {

class SmoothMapOracle {
 public:
  virtual ~SmoothMapOracle() = default;
  virtual int n() const = 0;           // domain dimension
  virtual int components() const = 0;  // range dimension (m + 1 for Phi)
  int m() const { return components() - 1; }
  virtual Vec value(const Vec& x) const = 0;
  virtual Mat jacobian(const Vec& x) const = 0;
  virtual std::vector<Mat> hessian(const Vec& x) const = 0;
};

struct QuadComponent {
  double c = 0.0;
  Vec g;
  Mat H;  // Hessian of the component
};

// Component i is c_i + <g_i, x> + x'H_i x / 2.
class QuadraticMap : public SmoothMapOracle {
 public:
  QuadraticMap() = default;
  QuadraticMap(int n, std::vector<QuadComponent> comps);

  int n() const override { return n_; }
  int components() const override { return static_cast<int>(comps_.size()); }
  Vec value(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  std::vector<Mat> hessian(const Vec& x) const override;

  const std::vector<QuadComponent>& parts() const { return comps_; }

 private:
  int n_ = 0;
  std::vector<QuadComponent> comps_;
};

struct StationaryPair {
  Vec x;
  Vec x_star;
};

enum class MultiplierKind { Empty, Singleton, Ray, SlaterBody };
const char* to_string(MultiplierKind k);

struct MultiplierSet {
  MultiplierKind kind = MultiplierKind::Empty;
  Vec point;       // Singleton: the multiplier; Ray: the generator
  Vec particular;  // SlaterBody: lambda_p with J' lambda_p = x*
  Mat basis;       // SlaterBody: kernel basis of J'
  Vec relint;      // a relative-interior element (absent when Empty)
  std::string lms; // "LMS1"/"LMS2"/"LMS3" when Phi(x) = 0, else ""
  ConeSet set = ConeSet::empty(1);
};

ConeSet tangent_cone_Gamma(const SmoothMapOracle& phi, const Vec& x);
ConeSet normal_cone_Gamma(const SmoothMapOracle& phi, const Vec& x);

MultiplierSet multiplier_set(const SmoothMapOracle& phi, const StationaryPair& pair,
                             double tol = 1e-9);

// Throws NotFeasible / InvalidPair; returns the multiplier set.
MultiplierSet validate_pair(const SmoothMapOracle& phi, const StationaryPair& pair);

ConeSet critical_cone(const SmoothMapOracle& phi, const StationaryPair& pair);

// -(lambda0 / Phi0(x)) sym(hatJ' J) on bd Q \ {0}, zero otherwise.
Mat curvature_term(const SmoothMapOracle& phi, const Vec& x, const Vec& lambda);

// Hessian of <lambda, Phi> plus the curvature term.
Mat second_order_operator(const SmoothMapOracle& phi, const Vec& x, const Vec& lambda);

// T of N_Q(Phi(x)) at lambda.
ConeSet tangent_to_normal_cone(const Vec& phi_value, const Vec& lambda);

ConeSet normal_cone_to_critical(const SmoothMapOracle& phi, const StationaryPair& pair,
                                const Vec& lambda, const Vec& v);

bool check_dual_cq(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& lambda);
bool check_srcq(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& lambda);
bool check_rcq(const SmoothMapOracle& phi, const Vec& x);

struct MscqPoint {
  Vec x;
  double dist_gamma = 0.0;
  double dist_q = 0.0;
  double ratio = 0.0;
};

struct MscqReport {
  double kappa_hat = 0.0;
  int evaluated = 0;
  int skipped = 0;
  std::vector<MscqPoint> points;
};

// Falsification probe of dist(x; Gamma) <= kappa dist(Phi(x); Q).
MscqReport probe_mscq(const SmoothMapOracle& phi, const Vec& xbar, double radius, int grid);

// Local distance from x to Gamma by penalty descent plus restoration.
double dist_to_gamma(const SmoothMapOracle& phi, const Vec& x);

struct SoscResult {
  bool holds = false;
  double lower_bound = 0.0;  // certified lower bound of the min of the form
  double sampled_min = 0.0;  // best value found on sampled unit directions
};

// phi0 is a one-component map. Only defined for Phi(xbar) = 0.
SoscResult check_sosc(const SmoothMapOracle& phi, const SmoothMapOracle& phi0, const Vec& xbar,
                      const Vec& lambda, int samples = 2000);

}  // namespace socva
