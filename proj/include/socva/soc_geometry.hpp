#pragma once

// Geometry of the Lorentz cone Q = {(x0, xr) : ||xr|| <= x0} in R^{m+1}.

#include "socva/common.hpp"
#include "socva/cone_sets.hpp"

namespace socva {

// Points of R^{m+1} are plain vectors; index 0 is the head x0.
using SocVector = Vec;

enum class PointClass { InteriorQ, BoundaryNonzero, Origin, Outside };
const char* to_string(PointClass c);

inline constexpr double kClassifyTol = 1e-9;

inline double head(const Vec& x) { return x(0); }
inline Vec tail(const Vec& x) { return x.tail(x.size() - 1); }
// (x0, xr) -> (-x0, xr)
Vec hat(const Vec& x);

PointClass classify(const Vec& x, double tol = kClassifyTol);
// Exact (tolerance-free) test ||xr|| <= x0.
bool in_Q(const Vec& x);

Vec project(const Vec& x);
Vec project_neg(const Vec& x);  // onto -Q
double dist_to_Q(const Vec& x);

struct ReductionImage {
  double first = 0.0;   // ||xr||^2 - x0^2
  double second = 0.0;  // -x0
};
ReductionImage reduce(const Vec& x);
double dist_to_R2minus(const ReductionImage& p);

ConeSet tangent_cone_Q(const Vec& x, double tol = kClassifyTol);
ConeSet normal_cone_Q(const Vec& x, double tol = kClassifyTol);

}  // namespace socva
