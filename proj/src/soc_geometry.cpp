#include "socva/soc_geometry.hpp"

#include <cmath>

namespace socva {

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::InteriorQ: return "InteriorQ";
    case PointClass::BoundaryNonzero: return "BoundaryNonzero";
    case PointClass::Origin: return "Origin";
    case PointClass::Outside: return "Outside";
  }
  return "Unknown";
}

Vec hat(const Vec& x) {
  Vec h = x;
  h(0) = -x(0);
  return h;
}

PointClass classify(const Vec& x, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "classify: tol must be positive");
  const double nx = x.norm();
  if (nx <= tol) return PointClass::Origin;
  const double scale = std::max(1.0, nx);
  const double x0 = x(0);
  const double r = tail(x).norm();
  if (std::abs(x0 - r) <= tol * scale) return PointClass::BoundaryNonzero;
  if (r < x0 - tol * scale) return PointClass::InteriorQ;
  return PointClass::Outside;
}

bool in_Q(const Vec& x) { return tail(x).norm() <= x(0); }

Vec project(const Vec& x) {
  const double x0 = x(0);
  const Vec xr = tail(x);
  const double r = xr.norm();
  if (r <= x0) return x;
  if (r <= -x0) return Vec::Zero(x.size());
  // here r > |x0| >= 0
  const double c = 0.5 * (x0 + r);
  Vec p(x.size());
  p(0) = c;
  p.tail(xr.size()) = (c / r) * xr;
  return p;
}

Vec project_neg(const Vec& x) { return -project(-x); }

double dist_to_Q(const Vec& x) {
  const double x0 = x(0);
  const double r = tail(x).norm();
  if (r <= x0) return 0.0;
  if (r <= -x0) return x.norm();
  return std::sqrt(0.5) * (r - x0);
}

ReductionImage reduce(const Vec& x) {
  const double r2 = tail(x).squaredNorm();
  return {r2 - x(0) * x(0), -x(0)};
}

double dist_to_R2minus(const ReductionImage& p) {
  // x in Q
  if (p.first <= 0.0 && p.second <= 0.0) return 0.0;
  // x in -Q
  if (p.first <= 0.0) return p.second;
  // outside Q and -Q, head >= 0
  if (p.second <= 0.0) return p.first;
  return std::sqrt(p.first * p.first + p.second * p.second);
}

ConeSet tangent_cone_Q(const Vec& x, double tol) {
  const int n = static_cast<int>(x.size());
  switch (classify(x, tol)) {
    case PointClass::InteriorQ: return ConeSet::all(n);
    case PointClass::Origin: return ConeSet::soc(n);
    case PointClass::BoundaryNonzero: return ConeSet::halfspace(hat(x));
    case PointClass::Outside: break;
  }
  throw Error(ErrorCode::OutsideCone, "tangent_cone_Q: point outside Q");
}

ConeSet normal_cone_Q(const Vec& x, double tol) {
  const int n = static_cast<int>(x.size());
  switch (classify(x, tol)) {
    case PointClass::InteriorQ: return ConeSet::zero(n);
    case PointClass::Origin: return ConeSet::neg_soc(n);
    case PointClass::BoundaryNonzero: return ConeSet::ray(hat(x));
    case PointClass::Outside: break;
  }
  throw Error(ErrorCode::OutsideCone, "normal_cone_Q: point outside Q");
}

}  // namespace socva
