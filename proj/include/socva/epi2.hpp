#pragma once

// Second-order epi-derivative of the indicator of Q, the graphical
// derivative of N_Q, and supporting numerical checks.

#include "socva/cone_sets.hpp"
#include "socva/soc_geometry.hpp"

namespace socva {

// Finite real or +infinity; +infinity is never stored as a float.
struct ExtendedReal {
  bool infinite = false;
  double value = 0.0;

  static ExtendedReal inf() { return {true, 0.0}; }
  static ExtendedReal finite(double v) { return {false, v}; }
  bool is_finite() const { return !infinite; }
};

struct CriticalConeQ {
  Vec xbar;
  Vec ybar;
  ConeSet cone = ConeSet::zero(1);
};

// T_Q(xbar) n {ybar}-perp. Throws InvalidNormal if ybar is not in N_Q(xbar).
CriticalConeQ critical_cone_Q(const Vec& xbar, const Vec& ybar);

ExtendedReal epi_second_derivative(const Vec& xbar, const Vec& ybar, const Vec& v);

// (delta_Q(xbar + t v) - delta_Q(xbar) - t <ybar, v>) / (t^2 / 2)
ExtendedReal second_order_quotient(const Vec& xbar, const Vec& ybar, const Vec& v, double t);

// Direction v_t with xbar + t v_t on bd Q and v_t -> v. Requires xbar on
// bd Q \ {0} and v on bd K \ Q; any norms are accepted (rescaled inside).
Vec recovery_sequence(const Vec& xbar, const Vec& ybar, const Vec& v, double t);

// DN_Q(xbar, ybar)(v); Empty when v is not critical.
ConeSet graphical_derivative_NQ(const Vec& xbar, const Vec& ybar, const Vec& v);

struct PdcWitness {
  Vec ybar;
  Vec v;
  Vec w;
};

// Requires xbar on bd Q \ {0}. No witness exists in R^2 (there Q is
// polyhedral); that case throws NotApplicable.
PdcWitness pdc_failure_witness(const Vec& xbar);

}  // namespace socva
