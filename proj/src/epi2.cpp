#include "socva/epi2.hpp"

#include <cmath>

namespace socva {

namespace {

constexpr double kNormalTol = 1e-10;
constexpr double kCriticalTol = 1e-10;

bool is_zero(const Vec& y) { return y.norm() <= 1e-14; }

}  // namespace

CriticalConeQ critical_cone_Q(const Vec& xbar, const Vec& ybar) {
  if (xbar.size() != ybar.size() || xbar.size() < 2)
    throw Error(ErrorCode::InvalidInput, "critical_cone_Q: dimension mismatch");
  const ConeSet N = normal_cone_Q(xbar);
  if (!membership(N, ybar, kNormalTol))
    throw Error(ErrorCode::InvalidNormal, "ybar is not a normal to Q at xbar");
  CriticalConeQ out;
  out.xbar = xbar;
  out.ybar = ybar;
  const int n = static_cast<int>(xbar.size());
  switch (classify(xbar)) {
    case PointClass::InteriorQ: out.cone = ConeSet::all(n); break;
    case PointClass::Origin:
      out.cone = ConeSet::intersect(ConeSet::soc(n), ConeSet::hyperplane(ybar));
      break;
    case PointClass::BoundaryNonzero:
      out.cone = is_zero(ybar) ? ConeSet::halfspace(hat(xbar)) : ConeSet::hyperplane(hat(xbar));
      break;
    case PointClass::Outside: throw Error(ErrorCode::OutsideCone, "critical_cone_Q");
  }
  return out;
}

ExtendedReal epi_second_derivative(const Vec& xbar, const Vec& ybar, const Vec& v) {
  const CriticalConeQ K = critical_cone_Q(xbar, ybar);
  if (!membership(K.cone, v, kCriticalTol)) return ExtendedReal::inf();
  if (classify(xbar) != PointClass::BoundaryNonzero) return ExtendedReal::finite(0.0);
  const double c = ybar.norm() / xbar.norm();
  return ExtendedReal::finite(c * (tail(v).squaredNorm() - v(0) * v(0)));
}

ExtendedReal second_order_quotient(const Vec& xbar, const Vec& ybar, const Vec& v, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidInput, "second_order_quotient: t must be positive");
  const Vec x = xbar + t * v;
  const double slack = 1e-12 * scale_of(x);
  if (tail(x).norm() - x(0) > slack) return ExtendedReal::inf();
  return ExtendedReal::finite(-t * ybar.dot(v) / (0.5 * t * t));
}

Vec recovery_sequence(const Vec& xbar_in, const Vec& ybar, const Vec& v_in, double t) {
  if (classify(xbar_in) != PointClass::BoundaryNonzero)
    throw Error(ErrorCode::InvalidInput, "recovery_sequence: xbar must lie on bd Q \\ {0}");
  (void)critical_cone_Q(xbar_in, ybar);
  const double nx = xbar_in.norm(), nv = v_in.norm();
  if (nv == 0.0) return v_in;
  const Vec xb = xbar_in / nx;
  const Vec v = v_in / nv;
  const double s = t * nv / nx;

  const double x0 = xb(0);
  const double v0 = v(0);
  const double gap = tail(v).squaredNorm() - v0 * v0;  // >= 0 on bd K \ Q
  const double x02 = x0 * x0, s2 = s * s;
  auto p = [&](double a) {
    const double a2 = a * a;
    return (gap * gap + 16 * x02 * v0 * v0) * a2 * a2 + 32 * x02 * x0 * v0 * a2 * a +
           16 * (x02 * x02 - s2 * x02 * v0 * v0) * a2 - 32 * s2 * x02 * x0 * v0 * a -
           16 * s2 * x02 * x02;
  };
  double lo = 0.0;
  double hi = v0 < 0 ? -x0 / v0 : 10.0 * s;
  if (!(p(lo) < 0.0) || !(p(hi) > 0.0))
    throw Error(ErrorCode::NoRoot, "recovery_sequence: no sign change of the quartic");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  const double a = 0.5 * (lo + hi);
  const double beta = a * a * gap / (4.0 * x0 * (x0 + a * v0));
  const Vec step = a * v - beta * hat(xb);
  // back to the caller's scaling: xbar + t v_t = nx (xb + step)
  return (nv / s) * step;
}

ConeSet graphical_derivative_NQ(const Vec& xbar, const Vec& ybar, const Vec& v) {
  const CriticalConeQ K = critical_cone_Q(xbar, ybar);
  const int n = static_cast<int>(xbar.size());
  if (!membership(K.cone, v, kCriticalTol)) return ConeSet::empty(n);
  const ConeSet N = normal_cone_of(K.cone, v, kCriticalTol);
  if (classify(xbar) != PointClass::BoundaryNonzero) return N;
  const double c = ybar.norm() / xbar.norm();
  return ConeSet::translate(c * hat(v), N);
}

PdcWitness pdc_failure_witness(const Vec& xbar) {
  if (classify(xbar) != PointClass::BoundaryNonzero)
    throw Error(ErrorCode::InvalidInput, "pdc_failure_witness: xbar must lie on bd Q \\ {0}");
  const int m = static_cast<int>(xbar.size()) - 1;
  if (m < 2)
    throw Error(ErrorCode::NotApplicable,
                "pdc_failure_witness: in R^2 the cone is polyhedral and no witness exists");
  PdcWitness out;
  out.ybar = hat(xbar) / xbar.norm();
  // v = (0, u) with u orthogonal to the tail of xbar
  const Mat B = null_space(Mat(tail(xbar).transpose()));
  out.v = Vec::Zero(m + 1);
  out.v.tail(m) = B.col(0);
  out.w = (out.ybar.norm() / xbar.norm()) * hat(out.v);
  return out;
}

}  // namespace socva
