#include "socva/conic_lp.hpp"

#include "socva/conic_feasibility.hpp"

#include <cmath>
#include <limits>

namespace socva {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

const char* to_string(ArgminKind k) {
  switch (k) {
    case ArgminKind::None: return "None";
    case ArgminKind::Singleton: return "Singleton";
    case ArgminKind::Ray: return "Ray";
    case ArgminKind::WholeSet: return "WholeSet";
  }
  return "Unknown";
}

namespace {

LpOutcome infeasible(int k) {
  LpOutcome o;
  o.status = LpStatus::Infeasible;
  o.argmin = ConeSet::empty(k);
  return o;
}

LpOutcome unbounded(int k) {
  LpOutcome o;
  o.status = LpStatus::Unbounded;
  o.value = -std::numeric_limits<double>::infinity();
  o.argmin = ConeSet::empty(k);
  return o;
}

LpOutcome single(const Vec& c, const Vec& lam) {
  LpOutcome o;
  o.status = LpStatus::Optimal;
  o.value = c.dot(lam);
  o.kind = ArgminKind::Singleton;
  o.point = lam;
  o.argmin = ConeSet::singleton(lam);
  return o;
}

Mat soc_metric(int k) {
  Mat D = -Mat::Identity(k, k);
  D(0, 0) = 1.0;
  return D;
}

// Newton polish of the boundary KKT system in (mu, sigma):
//   g = sigma Z'D lambda,  lambda'D lambda / 2 = 0,  lambda = lp + Z mu.
Vec polish(const Vec& lp, const Mat& Z, const Vec& g, const Vec& lam0) {
  const int k = static_cast<int>(lp.size());
  const int q = static_cast<int>(Z.cols());
  const Mat D = soc_metric(k);
  Vec mu = Z.transpose() * (lam0 - lp);
  auto lam_of = [&](const Vec& m) { return Vec(lp + Z * m); };
  Vec grad_h = Z.transpose() * D * lam_of(mu);
  double sigma = grad_h.squaredNorm() > 0 ? grad_h.dot(g) / grad_h.squaredNorm() : 0.0;
  auto residual = [&](const Vec& m, double s) {
    const Vec l = lam_of(m);
    Vec r(q + 1);
    r.head(q) = g - s * Z.transpose() * D * l;
    r(q) = 0.5 * l.dot(D * l);
    return r;
  };
  Vec r = residual(mu, sigma);
  for (int it = 0; it < 30; ++it) {
    if (r.norm() <= 1e-15 * std::max(1.0, g.norm())) break;
    const Vec l = lam_of(mu);
    Mat Jac(q + 1, q + 1);
    Jac.topLeftCorner(q, q) = -sigma * Z.transpose() * D * Z;
    Jac.topRightCorner(q, 1) = -Z.transpose() * D * l;
    Jac.bottomLeftCorner(1, q) = (D * l).transpose() * Z;
    Jac(q, q) = 0.0;
    const Vec step = lstsq(Jac, -r, 1e-14);
    const Vec mu_n = mu + step.head(q);
    const double s_n = sigma + step(q);
    const Vec r_n = residual(mu_n, s_n);
    if (!(r_n.norm() < r.norm())) break;
    mu = mu_n;
    sigma = s_n;
    r = r_n;
  }
  return lam_of(mu);
}

LpOutcome solve_neg_soc(const SocLinearProgram& P) {
  const int k = static_cast<int>(P.c.size());
  const double bscale = scale_of(P.b);
  const Vec lp = lstsq(P.A, P.b);
  if ((P.A * lp - P.b).norm() > 1e-9 * bscale) return infeasible(k);
  const Mat Z = null_space(P.A);
  const MarginResult mr = max_soc_margin(lp, Z, -1.0);
  const double s = scale_of(lp);
  if (!(mr.unbounded || mr.sup >= -1e-9 * s)) return infeasible(k);
  const ConeSet feas = ConeSet::intersect(ConeSet::neg_soc(k), ConeSet::affine_solutions(P.A, P.b));

  const Vec g = Z.transpose() * P.c;
  if (g.norm() <= 1e-12 * scale_of(P.c)) {
    LpOutcome o;
    o.status = LpStatus::Optimal;
    o.value = P.c.dot(lp);
    o.kind = ArgminKind::WholeSet;
    o.point = project_neg(Vec(lp + Z * mr.y));
    o.argmin = feas;
    return o;
  }

  // recession directions Z mu in -Q with <g, mu> = -1
  {
    const Vec mu0 = -g / g.squaredNorm();
    const Mat W = null_space(Mat(g.transpose()));
    const Vec p = Z * mu0;
    const MarginResult rec = max_soc_margin(p, Z * W, -1.0);
    if (rec.unbounded || rec.sup >= -1e-10 * scale_of(p)) return unbounded(k);
  }

  const bool cone_case = P.b.norm() <= 1e-12 * bscale;
  if (cone_case) {
    LpOutcome o;
    o.status = LpStatus::Optimal;
    o.value = 0.0;
    const ConeSet arg = ConeSet::intersect(
        ConeSet::neg_soc(k),
        ConeSet::affine_solutions(vstack(P.A, Mat(P.c.transpose())), Vec::Zero(P.A.rows() + 1)));
    if (const auto nz = find_nonzero(arg)) {
      o.kind = ArgminKind::Ray;
      o.point = *nz / nz->norm();
      o.argmin = ConeSet::ray(o.point);
    } else {
      o.kind = ArgminKind::Singleton;
      o.point = Vec::Zero(k);
      o.argmin = ConeSet::zero(k);
    }
    return o;
  }

  // no Slater point: the slice meets -Q in a single boundary point
  if (!mr.unbounded && mr.sup <= 1e-9 * s) return single(P.c, project_neg(Vec(lp + Z * mr.y)));

  const double clp = P.c.dot(lp);
  const Mat W = null_space(Mat(g.transpose()));
  const Mat ZW = Z * W;
  auto level = [&](double tau) {
    const Vec p = lp + Z * g * ((tau - clp) / g.squaredNorm());
    MarginResult r = max_soc_margin(p, ZW, -1.0);
    return std::make_pair(r, p);
  };
  const Vec lam_s = lp + Z * mr.y;
  double hi = P.c.dot(lam_s);
  double delta = std::max(1.0, std::abs(hi));
  double lo = hi - delta;
  int guard = 0;
  while (true) {
    const auto r = level(lo).first;
    if (!(r.unbounded || r.sup >= 0.0)) break;
    hi = lo;
    delta *= 2.0;
    lo = hi - delta;
    if (++guard > 200) return unbounded(k);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const auto r = level(mid).first;
    if (r.unbounded || r.sup >= 0.0) hi = mid;
    else lo = mid;
  }
  const auto [r, p] = level(hi);
  Vec lam = p + ZW * r.y;
  lam = polish(lp, Z, g, lam);
  lam = project_neg(lam);
  LpOutcome o = single(P.c, lam);
  if (lam.norm() > 1e8 * s) o.attained = false;
  return o;
}

}  // namespace

LpOutcome solve_lp(const SocLinearProgram& P) {
  const int k = static_cast<int>(P.c.size());
  if (P.A.cols() != k || P.A.rows() != P.b.size() || P.cone.dim() != k)
    throw Error(ErrorCode::InvalidInput, "solve_lp: dimension mismatch");
  const double bscale = scale_of(P.b);
  switch (P.cone.kind()) {
    case SetKind::Zero:
      if (P.b.norm() > 1e-9 * bscale) return infeasible(k);
      return single(P.c, Vec::Zero(k));
    case SetKind::Ray: {
      const Vec& d = P.cone.vec();
      const Vec Ad = P.A * d;
      if (Ad.norm() > kRankRel * std::max(1.0, P.A.norm()) * d.norm()) {
        const double t = Ad.dot(P.b) / Ad.squaredNorm();
        if ((t * Ad - P.b).norm() > 1e-9 * bscale || t < -1e-9) return infeasible(k);
        return single(P.c, std::max(t, 0.0) * d);
      }
      if (P.b.norm() > 1e-9 * bscale) return infeasible(k);
      const double cd = P.c.dot(d);
      const double ctol = 1e-12 * scale_of(P.c) * d.norm();
      if (cd > ctol) return single(P.c, Vec::Zero(k));
      if (cd < -ctol) return unbounded(k);
      LpOutcome o;
      o.status = LpStatus::Optimal;
      o.value = 0.0;
      o.kind = ArgminKind::Ray;
      o.point = d / d.norm();
      o.argmin = ConeSet::ray(o.point);
      return o;
    }
    case SetKind::NegSOC: return solve_neg_soc(P);
    default: break;
  }
  throw Error(ErrorCode::Unsupported, "solve_lp: cone must be Zero, Ray or NegSOC");
}

SocLinearProgram multiplier_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v) {
  (void)validate_pair(phi, pair);
  const Vec F = phi.value(pair.x);
  const Mat J = phi.jacobian(pair.x);
  const auto H = phi.hessian(pair.x);
  const int k = phi.components();
  SocLinearProgram P;
  P.c = Vec(k);
  for (int i = 0; i < k; ++i) P.c(i) = -v.dot(H[i] * v);
  if (classify(F) == PointClass::BoundaryNonzero) {
    const Vec Jv = J * v;
    P.c(0) += (Jv.tail(k - 1).squaredNorm() - Jv(0) * Jv(0)) / F(0);
  }
  P.A = J.transpose();
  P.b = pair.x_star;
  P.cone = normal_cone_Q(F);
  return P;
}

LpOutcome solve_multiplier_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v) {
  if (!membership(critical_cone(phi, pair), v))
    throw Error(ErrorCode::DirectionNotCritical, "v is not in the critical cone");
  return solve_lp(multiplier_lp(phi, pair, v));
}

DualCertificate solve_dual_lp(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& v,
                              double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "solve_dual_lp: eps must be positive");
  const Vec F = phi.value(pair.x);
  if (classify(F) != PointClass::Origin)
    throw Error(ErrorCode::NotApplicable, "solve_dual_lp: requires Phi(x) = 0");
  const LpOutcome out = solve_multiplier_lp(phi, pair, v);
  if (out.status != LpStatus::Optimal || !out.attained)
    throw Error(ErrorCode::CertificateFailed, "primal program has no attained optimum");
  const Mat J = phi.jacobian(pair.x);
  const auto H = phi.hessian(pair.x);
  const int k = phi.components();
  const int n = phi.n();
  Vec h(k);
  for (int i = 0; i < k; ++i) h(i) = v.dot(H[i] * v);
  const Vec& xs = pair.x_star;
  const double pstar = out.value;

  auto finish = [&](const Vec& z) {
    DualCertificate c;
    c.z = z;
    c.eps = eps;
    c.dist = dist_to_Q(J * z + h);
    c.pairing = xs.dot(z) - pstar;
    return c;
  };
  auto good = [&](const DualCertificate& c) {
    return c.dist <= eps && c.pairing >= -eps && c.z.norm() <= 1e6;
  };

  if (xs.norm() <= 1e-12) {
    const MarginResult mr = max_soc_margin(h, J, 1.0, eps, 0.0);
    const DualCertificate c = finish(mr.y);
    if (good(c)) return c;
    throw Error(ErrorCode::CertificateFailed, "no certificate within the norm cap");
  }
  const Mat Nb = null_space(Mat(xs.transpose()));
  for (double frac : {0.0, 0.25, 0.5, 0.75}) {
    const double target = pstar - frac * eps;
    const Vec z0 = target * xs / xs.squaredNorm();
    Vec z = z0;
    if (Nb.cols() > 0) {
      const MarginResult mr = max_soc_margin(J * z0 + h, J * Nb, 1.0, eps, 0.0);
      z = z0 + Nb * mr.y;
    } else {
      (void)n;
    }
    const DualCertificate c = finish(z);
    if (good(c)) return c;
  }
  throw Error(ErrorCode::CertificateFailed, "no certificate within the norm cap");
}

namespace {

Vec sphere_point(const Vec& ang) {
  const int k = static_cast<int>(ang.size()) + 1;
  Vec x(k);
  double s = 1.0;
  for (int i = 0; i < k - 1; ++i) {
    x(i) = s * std::cos(ang(i));
    s *= std::sin(ang(i));
  }
  x(k - 1) = s;
  return x;
}

}  // namespace

double brute_force_lp_oracle(const SocLinearProgram& P, int grid, double radius) {
  grid = std::max(grid, 3);
  switch (P.cone.kind()) {
    case SetKind::Zero: return 0.0;
    case SetKind::Ray: {
      const Vec& d = P.cone.vec();
      const Vec Ad = P.A * d;
      if (Ad.norm() > 1e-12) return P.c.dot(d) * Ad.dot(P.b) / Ad.squaredNorm();
      double best = 0.0;
      for (int i = 0; i < grid; ++i) best = std::min(best, P.c.dot(d) * radius * i / (grid - 1) / d.norm());
      return best;
    }
    case SetKind::NegSOC: break;
    default: throw Error(ErrorCode::Unsupported, "oracle: unsupported cone");
  }
  const Vec lp = lstsq(P.A, P.b);
  const Mat Z = null_space(P.A);
  const int q = static_cast<int>(Z.cols());
  const double clp = P.c.dot(lp);
  if (q == 0) return clp;
  const Vec g = Z.transpose() * P.c;
  const double R = std::sqrt(std::max(0.0, radius * radius - lp.squaredNorm()));
  auto margin = [&](const Vec& mu) {
    return std::min(soc_margin(Vec(lp + Z * mu), -1.0), R - mu.norm());
  };

  // interior point by zoomed grid search on the margin
  Vec center = Vec::Zero(q);
  double width = R;
  double best_m = margin(center);
  for (int lvl = 0; lvl < 40; ++lvl) {
    std::vector<int> idx(q, 0);
    Vec best_pt = center;
    while (true) {
      Vec mu(q);
      for (int i = 0; i < q; ++i) mu(i) = center(i) + width * (-1.0 + 2.0 * idx[i] / (grid - 1));
      const double m = margin(mu);
      if (m > best_m) {
        best_m = m;
        best_pt = mu;
      }
      int i = 0;
      while (i < q && ++idx[i] == grid) idx[i++] = 0;
      if (i == q) break;
    }
    center = best_pt;
    width *= 0.5;
  }
  if (best_m <= 0.0) return clp + g.dot(center);

  // boundary point along direction theta from the interior point
  auto boundary_value = [&](const Vec& theta) {
    double lo = 0.0, hi = 2.0 * R + center.norm();
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (margin(Vec(center + mid * theta)) >= 0.0) lo = mid;
      else hi = mid;
    }
    return clp + g.dot(center + lo * theta);
  };
  if (q == 1) {
    return std::min(boundary_value(Vec::Constant(1, 1.0)), boundary_value(Vec::Constant(1, -1.0)));
  }
  const int na = q - 1;
  Vec ang_c(na), half(na);
  for (int i = 0; i < na; ++i) {
    const bool last = i == na - 1;
    ang_c(i) = last ? M_PI : M_PI / 2;
    half(i) = last ? M_PI : M_PI / 2;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int lvl = 0; lvl < 25; ++lvl) {
    std::vector<int> idx(na, 0);
    Vec best_ang = ang_c;
    while (true) {
      Vec a(na);
      for (int i = 0; i < na; ++i) a(i) = ang_c(i) + half(i) * (-1.0 + 2.0 * idx[i] / (grid - 1));
      const double f = boundary_value(sphere_point(a));
      if (f < best) {
        best = f;
        best_ang = a;
      }
      int i = 0;
      while (i < na && ++idx[i] == grid) idx[i++] = 0;
      if (i == na) break;
    }
    ang_c = best_ang;
    half *= 4.0 / (grid - 1);
  }
  return best;
}

}  // namespace socva
