#include "socva/constraint_system.hpp"

#include "socva/conic_feasibility.hpp"
#include "socva/epi2.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace socva {

QuadraticMap::QuadraticMap(int n, std::vector<QuadComponent> comps) : n_(n), comps_(std::move(comps)) {
  if (n <= 0) throw Error(ErrorCode::InvalidInput, "QuadraticMap: n must be positive");
  for (auto& c : comps_) {
    if (c.g.size() == 0) c.g = Vec::Zero(n);
    if (c.H.size() == 0) c.H = Mat::Zero(n, n);
    if (c.g.size() != n || c.H.rows() != n || c.H.cols() != n)
      throw Error(ErrorCode::InvalidInput, "QuadraticMap: component dimension mismatch");
    c.H = 0.5 * (c.H + c.H.transpose());
  }
}

Vec QuadraticMap::value(const Vec& x) const {
  Vec out(components());
  for (int i = 0; i < components(); ++i) {
    const auto& c = comps_[i];
    out(i) = c.c + c.g.dot(x) + 0.5 * x.dot(c.H * x);
  }
  return out;
}

Mat QuadraticMap::jacobian(const Vec& x) const {
  Mat J(components(), n_);
  for (int i = 0; i < components(); ++i) J.row(i) = (comps_[i].g + comps_[i].H * x).transpose();
  return J;
}

std::vector<Mat> QuadraticMap::hessian(const Vec&) const {
  std::vector<Mat> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c.H);
  return out;
}

const char* to_string(MultiplierKind k) {
  switch (k) {
    case MultiplierKind::Empty: return "Empty";
    case MultiplierKind::Singleton: return "Singleton";
    case MultiplierKind::Ray: return "Ray";
    case MultiplierKind::SlaterBody: return "SlaterBody";
  }
  return "Unknown";
}

namespace {

Vec checked_value(const SmoothMapOracle& phi, const Vec& x) {
  if (x.size() != phi.n()) throw Error(ErrorCode::InvalidInput, "point has wrong dimension");
  const Vec F = phi.value(x);
  if (classify(F) == PointClass::Outside)
    throw Error(ErrorCode::NotFeasible, "Phi(x) is not in Q");
  return F;
}

MultiplierSet empty_set(int k) {
  MultiplierSet s;
  s.set = ConeSet::empty(k);
  return s;
}

MultiplierSet singleton_set(const Vec& lam, const std::string& lms) {
  MultiplierSet s;
  s.kind = MultiplierKind::Singleton;
  s.point = lam;
  s.relint = lam;
  s.lms = lms;
  s.set = ConeSet::singleton(lam);
  return s;
}

MultiplierSet ray_set(const Vec& d, const std::string& lms) {
  MultiplierSet s;
  s.kind = MultiplierKind::Ray;
  s.point = d / d.norm();
  s.relint = s.point;
  s.lms = lms;
  s.set = ConeSet::ray(s.point);
  return s;
}

}  // namespace

ConeSet tangent_cone_Gamma(const SmoothMapOracle& phi, const Vec& x) {
  const Vec F = checked_value(phi, x);
  return ConeSet::preimage(phi.jacobian(x), tangent_cone_Q(F));
}

ConeSet normal_cone_Gamma(const SmoothMapOracle& phi, const Vec& x) {
  const Vec F = checked_value(phi, x);
  return ConeSet::linear_image(phi.jacobian(x).transpose(), normal_cone_Q(F));
}

MultiplierSet multiplier_set(const SmoothMapOracle& phi, const StationaryPair& pair, double tol) {
  const Vec F = checked_value(phi, pair.x);
  if (pair.x_star.size() != phi.n())
    throw Error(ErrorCode::InvalidInput, "x_star has wrong dimension");
  const int k = phi.components();
  const Mat JT = phi.jacobian(pair.x).transpose();
  const Vec& xs = pair.x_star;
  const double scale = scale_of(xs);
  const bool zero_star = xs.norm() <= tol * scale;

  switch (classify(F)) {
    case PointClass::InteriorQ:
      return zero_star ? singleton_set(Vec::Zero(k), "") : empty_set(k);
    case PointClass::BoundaryNonzero: {
      const Vec d = hat(F);
      const Vec Jd = JT * d;
      if (Jd.norm() > kRankRel * std::max(1.0, JT.norm()) * d.norm()) {
        const double t = Jd.dot(xs) / Jd.squaredNorm();
        if ((t * Jd - xs).norm() > tol * scale || t < -tol) return empty_set(k);
        return singleton_set(std::max(t, 0.0) * d, "");
      }
      if (!zero_star) return empty_set(k);
      return ray_set(d, "");
    }
    case PointClass::Origin: break;
    case PointClass::Outside: break;
  }

  const Vec lp = lstsq(JT, xs);
  if ((JT * lp - xs).norm() > tol * scale) return empty_set(k);
  const Mat Z = null_space(JT);
  const MarginResult mr = max_soc_margin(lp, Z, -1.0);
  const double s = scale_of(lp);
  if (mr.unbounded || mr.sup > 1e-9 * s) {
    MultiplierSet out;
    out.kind = MultiplierKind::SlaterBody;
    out.particular = lp;
    out.basis = Z;
    out.relint = lp + Z * mr.y;
    out.lms = "LMS1";
    out.set = ConeSet::intersect(ConeSet::neg_soc(k), ConeSet::affine_solutions(JT, xs));
    return out;
  }
  if (mr.sup < -tol * s) return empty_set(k);
  if (zero_star) {
    const auto nz = find_nonzero(ConeSet::intersect(ConeSet::neg_soc(k), ConeSet::span(Z)));
    if (nz) return ray_set(*nz, "LMS3");
    return singleton_set(Vec::Zero(k), "LMS3");
  }
  if (!mr.attained) return empty_set(k);
  Vec lam = lp + Z * mr.y;
  // clean onto bd(-Q); the slice touches -Q only there
  lam = project_neg(lam);
  return singleton_set(lam, "LMS2");
}

MultiplierSet validate_pair(const SmoothMapOracle& phi, const StationaryPair& pair) {
  MultiplierSet ms = multiplier_set(phi, pair);
  if (ms.kind == MultiplierKind::Empty)
    throw Error(ErrorCode::InvalidPair, "x_star is not a normal to Gamma at x");
  return ms;
}

ConeSet critical_cone(const SmoothMapOracle& phi, const StationaryPair& pair) {
  const MultiplierSet ms = validate_pair(phi, pair);
  const Vec F = phi.value(pair.x);
  const ConeSet C = ConeSet::intersect(tangent_cone_Q(F), ConeSet::hyperplane(ms.relint));
  return ConeSet::preimage(phi.jacobian(pair.x), C);
}

Mat curvature_term(const SmoothMapOracle& phi, const Vec& x, const Vec& lambda) {
  const int n = phi.n();
  const Vec F = phi.value(x);
  if (classify(F) != PointClass::BoundaryNonzero) return Mat::Zero(n, n);
  const Mat J = phi.jacobian(x);
  Mat Jh = J;
  Jh.row(0) = -J.row(0);
  const Mat P = Jh.transpose() * J;
  return -(lambda(0) / F(0)) * 0.5 * (P + P.transpose());
}

Mat second_order_operator(const SmoothMapOracle& phi, const Vec& x, const Vec& lambda) {
  const auto H = phi.hessian(x);
  Mat A = curvature_term(phi, x, lambda);
  for (size_t i = 0; i < H.size(); ++i) A += lambda(i) * H[i];
  return A;
}

ConeSet tangent_to_normal_cone(const Vec& F, const Vec& lambda) {
  const int k = static_cast<int>(F.size());
  switch (classify(F)) {
    case PointClass::InteriorQ: return ConeSet::zero(k);
    case PointClass::BoundaryNonzero: {
      const Vec d = hat(F);
      if (lambda.norm() <= 1e-12 * d.norm()) return ConeSet::ray(d);
      Mat G(k, 2);
      G << d, -d;
      return ConeSet::generated(G);
    }
    case PointClass::Origin:
      switch (classify(-lambda)) {
        case PointClass::Origin: return ConeSet::neg_soc(k);
        case PointClass::InteriorQ: return ConeSet::all(k);
        case PointClass::BoundaryNonzero: return ConeSet::halfspace(hat(lambda));
        case PointClass::Outside: break;
      }
      throw Error(ErrorCode::NotMember, "lambda is not in -Q");
    case PointClass::Outside: break;
  }
  throw Error(ErrorCode::NotFeasible, "Phi(x) is not in Q");
}

namespace {

void check_multiplier(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& lambda) {
  const Vec F = checked_value(phi, pair.x);
  if (lambda.size() != F.size()) throw Error(ErrorCode::InvalidInput, "multiplier has wrong dimension");
  const Mat JT = phi.jacobian(pair.x).transpose();
  const double scale = scale_of(pair.x_star);
  if ((JT * lambda - pair.x_star).norm() > 1e-9 * std::max(scale, lambda.norm()) ||
      !membership(normal_cone_Q(F), lambda, 1e-9))
    throw Error(ErrorCode::NotMember, "lambda is not a multiplier for the pair");
}

}  // namespace

ConeSet normal_cone_to_critical(const SmoothMapOracle& phi, const StationaryPair& pair,
                                const Vec& lambda, const Vec& v) {
  check_multiplier(phi, pair, lambda);
  if (!membership(critical_cone(phi, pair), v))
    throw Error(ErrorCode::NotMember, "v is not a critical direction");
  const Vec F = phi.value(pair.x);
  const Mat J = phi.jacobian(pair.x);
  const ConeSet T = tangent_to_normal_cone(F, lambda);
  return ConeSet::linear_image(J.transpose(), ConeSet::intersect(T, ConeSet::hyperplane(J * v)));
}

bool check_dual_cq(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& lambda) {
  check_multiplier(phi, pair, lambda);
  const Vec F = phi.value(pair.x);
  const Mat Z = null_space(phi.jacobian(pair.x).transpose());
  if (Z.cols() == 0) return true;
  const ConeSet D = graphical_derivative_NQ(F, lambda, Vec::Zero(F.size()));
  return !find_nonzero(ConeSet::intersect(D, ConeSet::span(Z))).has_value();
}

bool check_srcq(const SmoothMapOracle& phi, const StationaryPair& pair, const Vec& lambda) {
  check_multiplier(phi, pair, lambda);
  const Vec F = phi.value(pair.x);
  const int k = static_cast<int>(F.size());
  const ConeSet T = ConeSet::intersect(tangent_cone_Q(F), ConeSet::hyperplane(lambda));
  const ConeSet S = ConeSet::sum(ConeSet::span(phi.jacobian(pair.x)),
                                 ConeSet::linear_image(-Mat::Identity(k, k), T));
  if (S.kind() == SetKind::All) return true;
  for (int i = 0; i < k; ++i)
    for (double s : {1.0, -1.0})
      if (!membership(S, s * Vec::Unit(k, i))) return false;
  return true;
}

bool check_rcq(const SmoothMapOracle& phi, const Vec& x) {
  const Vec F = checked_value(phi, x);
  const Mat Z = null_space(phi.jacobian(x).transpose());
  if (Z.cols() == 0) return true;
  return !find_nonzero(ConeSet::intersect(normal_cone_Q(F), ConeSet::span(Z))).has_value();
}

namespace {

// BFGS on a smooth function; returns the final point.
template <class Fn>
Vec bfgs(const Fn& f, Vec x, int max_iter) {
  const int n = static_cast<int>(x.size());
  Mat H = Mat::Identity(n, n);
  auto [fx, g] = f(x);
  for (int it = 0; it < max_iter; ++it) {
    if (g.norm() <= 1e-13 * std::max(1.0, std::abs(fx))) break;
    Vec p = -H * g;
    if (p.dot(g) >= 0) {
      H.setIdentity();
      p = -g;
    }
    double step = 1.0;
    Vec xn;
    double fn = 0.0;
    Vec gn;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * p;
      auto r = f(xn);
      fn = r.first;
      gn = r.second;
      if (fn <= fx + 1e-4 * step * g.dot(p)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const Vec s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  return x;
}

}  // namespace

double dist_to_gamma(const SmoothMapOracle& phi, const Vec& x) {
  Vec y = x;
  for (int k = 0; k <= 8; ++k) {
    const double rho = std::pow(10.0, k);
    auto f = [&](const Vec& z) {
      const Vec F = phi.value(z);
      const Vec r = F - project(F);
      const double val = 0.5 * (z - x).squaredNorm() + 0.5 * rho * r.squaredNorm();
      const Vec g = (z - x) + rho * phi.jacobian(z).transpose() * r;
      return std::make_pair(val, g);
    };
    y = bfgs(f, y, 400);
  }
  double d = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Vec F = phi.value(y);
    const Vec r = F - project(F);
    d = r.norm();
    if (d < 1e-10) break;
    const Vec g = phi.jacobian(y).transpose() * r / d;
    if (g.squaredNorm() == 0.0) break;
    y -= d * g / g.squaredNorm();
  }
  if (!(d < 1e-10)) throw Error(ErrorCode::GridTooCoarse, "penalty solve did not reach Gamma");
  return (y - x).norm();
}

MscqReport probe_mscq(const SmoothMapOracle& phi, const Vec& xbar, double radius, int grid) {
  if (!(radius > 0.0) || grid < 2) throw Error(ErrorCode::InvalidInput, "probe_mscq: bad radius or grid");
  (void)checked_value(phi, xbar);
  const int n = phi.n();
  MscqReport rep;
  std::vector<int> idx(n, 0);
  while (true) {
    Vec off(n);
    for (int i = 0; i < n; ++i) off(i) = -radius + 2.0 * radius * idx[i] / (grid - 1);
    if (off.norm() <= radius * (1.0 + 1e-12)) {
      const Vec x = xbar + off;
      const double dq = dist_to_Q(phi.value(x));
      if (dq <= 1e-14) {
        ++rep.skipped;
      } else {
        MscqPoint p;
        p.x = x;
        p.dist_q = dq;
        p.dist_gamma = dist_to_gamma(phi, x);
        p.ratio = p.dist_gamma / dq;
        rep.kappa_hat = std::max(rep.kappa_hat, p.ratio);
        rep.points.push_back(p);
        ++rep.evaluated;
      }
    }
    int i = 0;
    while (i < n && ++idx[i] == grid) idx[i++] = 0;
    if (i == n) break;
  }
  return rep;
}

namespace {

double min_eig(const Mat& A) {
  if (A.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

SoscResult subspace_verdict(const Mat& H, const Mat& B) {
  SoscResult r;
  if (B.cols() == 0) {
    r.holds = true;
    r.lower_bound = r.sampled_min = std::numeric_limits<double>::infinity();
    return r;
  }
  const Mat Bo = range_basis(B);
  r.lower_bound = r.sampled_min = min_eig(Bo.transpose() * H * Bo);
  r.holds = r.lower_bound > 1e-8;
  return r;
}

}  // namespace

SoscResult check_sosc(const SmoothMapOracle& phi, const SmoothMapOracle& phi0, const Vec& xbar,
                      const Vec& lambda, int samples) {
  const Vec F = checked_value(phi, xbar);
  if (classify(F) != PointClass::Origin)
    throw Error(ErrorCode::NotApplicable, "check_sosc: requires Phi(xbar) = 0");
  const StationaryPair pair{xbar, Vec(-phi0.jacobian(xbar).row(0).transpose())};
  check_multiplier(phi, pair, lambda);
  const int n = phi.n();
  const int k = phi.components();
  const Mat J = phi.jacobian(xbar);
  const auto Hs = phi.hessian(xbar);
  Mat H = phi0.hessian(xbar)[0];
  for (int i = 0; i < k; ++i) H += lambda(i) * Hs[i];
  H = 0.5 * (H + H.transpose());

  const ConeSet inner = ConeSet::intersect(ConeSet::soc(k), ConeSet::hyperplane(lambda));
  const Mat N = null_space(J);
  if (inner.kind() == SetKind::Zero) return subspace_verdict(H, N);
  if (inner.kind() == SetKind::Ray) {
    // the form is even, so the half-space {Ju in R_+ d} may be swapped for its span
    const Vec ud = lstsq(J, inner.vec());
    if ((J * ud - inner.vec()).norm() > 1e-9 * inner.vec().norm()) return subspace_verdict(H, N);
    Mat B(n, N.cols() + 1);
    B << N, ud;
    return subspace_verdict(H, B);
  }

  // cone {u : Ju in Q}; up to sign this is {u : u'Su >= 0}
  Mat D = -Mat::Identity(k, k);
  D(0, 0) = 1.0;
  const Mat S = J.transpose() * D * J;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
  if (es.eigenvalues()(n - 1) <= 1e-12 * std::max(1.0, S.norm())) {
    std::vector<int> cols;
    for (int i = 0; i < n; ++i)
      if (std::abs(es.eigenvalues()(i)) <= 1e-12 * std::max(1.0, S.norm())) cols.push_back(i);
    Mat B(n, cols.size());
    for (size_t c = 0; c < cols.size(); ++c) B.col(c) = es.eigenvectors().col(cols[c]);
    return subspace_verdict(H, B);
  }
  SoscResult r;
  auto dual = [&](double nu) { return min_eig(H - nu * S); };
  double hi = 1.0;
  while (dual(2 * hi) > dual(hi) && hi < 1e12) hi *= 2;
  hi *= 2;
  double lo = 0.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (dual(a) < dual(b)) lo = a;
    else hi = b;
  }
  r.lower_bound = std::max(dual(0.0), dual(0.5 * (lo + hi)));

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd(0.0, 1.0);
  r.sampled_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u(i) = nd(rng);
    u.normalize();
    if (u.dot(S * u) < 0) continue;
    r.sampled_min = std::min(r.sampled_min, u.dot(H * u));
  }
  if (r.lower_bound > 1e-8) r.holds = true;
  else if (r.lower_bound > 0) r.holds = r.sampled_min > 1e-8;
  else r.holds = false;
  return r;
}

}  // namespace socva
