#include "socva/stability.hpp"

#include "socva/conic_feasibility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace socva {

const char* to_string(Verdict v) { return v == Verdict::Calm ? "Calm" : "NotCalm"; }

StationaryPair VariationalSystem::pair() const {
  if (!f || !phi) throw Error(ErrorCode::InvalidInput, "variational system without oracles");
  return {x_bar, p_bar - f->value(x_bar)};
}

namespace {

constexpr int kSphereSamples = 1000;
constexpr double kWitnessTol = 1e-8;

double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

// Deterministic low-discrepancy point on the unit sphere of R^d.
Vec halton_sphere(int i, int d) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (d == 1) return Vec::Constant(1, i % 2 == 0 ? 1.0 : -1.0);
  Vec x(d);
  double s = 1.0;
  for (int j = 0; j < d - 1; ++j) {
    const bool last = j == d - 2;
    const double ang = radical_inverse(i + 1, primes[j % 8]) * (last ? 2.0 * M_PI : M_PI);
    x(j) = s * std::cos(ang);
    s *= std::sin(ang);
  }
  x(d - 1) = s;
  return x;
}

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

struct Search {
  const VariationalSystem& sys;
  StationaryPair pair;
  Mat Df;
  std::optional<double> kappa;
  CalmnessVerdict& out;

  // Re-derives the inclusion at v from scratch; fills the witness on success.
  bool confirm(const Vec& v) {
    auto one = [&](const Vec& w, Vec* lam, Vec* nrm, double* res) {
      const GraphDerivativeResult r = graphical_derivative(*sys.phi, pair, w, kappa);
      if (!r.critical) return false;
      const Vec target = -Df * w;
      const auto dec = explain_member(r, target, 1e-9);
      if (!dec) return false;
      Vec l = r.lambdas.size() == 1 ? r.lambdas[0] : lstsq(r.op, dec->first);
      const Vec n = dec->second;
      const double rr = (Df * w + r.op * l + n).norm();
      if (rr > kWitnessTol * scale_of(w)) return false;
      if (lam) *lam = l;
      if (nrm) *nrm = n;
      if (res) *res = rr;
      return true;
    };
    Vec lam, nrm;
    double res = 0.0;
    if (!one(v, &lam, &nrm, &res)) return false;
    if (!one(Vec(2.0 * v), nullptr, nullptr, nullptr)) return false;
    out.verdict = Verdict::NotCalm;
    out.witness = v;
    out.lambda = lam;
    out.normal = nrm;
    out.residual = res;
    return true;
  }
};

// Boundary stratum of K = J^{-1} Q: v with J v on bd Q \ {0}, where
// N_K(v) = R_+ J' hat(J v). Minimizes the inclusion residual over samples.
std::optional<Vec> scan_soc_boundary(const Mat& J, const Mat& M, std::vector<std::string>& report) {
  const int n = static_cast<int>(J.cols());
  const MarginResult c = max_soc_margin(Vec::Zero(J.rows()), J, 1.0);
  if (!c.unbounded) throw Error(ErrorCode::StratumUnsupported, "critical cone has empty interior");
  const Vec vc = c.y.normalized();
  auto marg = [&](const Vec& v) { return soc_margin(Vec(J * v), 1.0); };
  auto to_boundary = [&](const Vec& s) -> std::optional<Vec> {
    Vec in = vc, outp = s;
    if (marg(s) >= 0.0) {
      if (marg(Vec(-vc)) >= 0.0) return std::nullopt;
      in = s;
      outp = -vc;
    }
    for (int it = 0; it < 100; ++it) {
      const Vec mid = (0.5 * (in + outp)).normalized();
      if (marg(mid) >= 0.0) in = mid;
      else outp = mid;
    }
    return in.normalized();
  };
  auto residual = [&](const Vec& v) {
    const Vec g = J.transpose() * hat(Vec(J * v));
    const Vec Mv = M * v;
    const double t = g.squaredNorm() > 0 ? std::max(0.0, -Mv.dot(g) / g.squaredNorm()) : 0.0;
    return (Mv + t * g).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  Vec best_s, best_v;
  for (int i = 0; i < kSphereSamples; ++i) {
    const Vec s = halton_sphere(i, n);
    const auto b = to_boundary(s);
    if (!b) continue;
    const double r = residual(*b);
    if (r < best) {
      best = r;
      best_s = s;
      best_v = *b;
    }
  }
  if (!std::isfinite(best)) return std::nullopt;
  double step = 0.1;
  for (int it = 0; it < 400 && best > 1e-12; ++it) {
    bool improved = false;
    for (int j = 0; j < n; ++j)
      for (double sg : {1.0, -1.0}) {
        Vec s = best_s;
        s(j) += sg * step;
        s.normalize();
        const auto b = to_boundary(s);
        if (!b) continue;
        const double r = residual(*b);
        if (r < best) {
          best = r;
          best_s = s;
          best_v = *b;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
    if (step < 1e-15) break;
  }
  std::ostringstream os;
  os << "soc boundary stratum: " << kSphereSamples << " samples, best residual " << best;
  report.push_back(os.str());
  if (best <= 1e-9) return best_v;
  return std::nullopt;
}

}  // namespace

CalmnessVerdict check_isolated_calmness(const VariationalSystem& sys, double kappa,
                                        const std::string& kappa_source) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidInput, "kappa must be positive");
  CalmnessVerdict out;
  out.kappa = kappa;
  out.kappa_source = kappa_source;
  const StationaryPair pair = sys.pair();
  const SmoothMapOracle& phi = *sys.phi;
  const MultiplierSet ms = validate_pair(phi, pair);
  const int n = phi.n();
  const Mat Df = sys.f->jacobian(sys.x_bar);
  const Mat J = phi.jacobian(sys.x_bar);
  const ConeSet K = critical_cone(phi, pair);
  Search search{sys, pair, Df, kappa, out};
  const bool zero_star = pair.x_star.norm() <= 1e-12;
  const double radius = kappa * pair.x_star.norm();

  if (zero_star || ms.kind == MultiplierKind::Singleton) {
    // one multiplier serves every direction
    Mat A = Mat::Zero(n, n);
    if (!zero_star) {
      if (ms.point.norm() > radius * (1 + 1e-9) + 1e-9) {
        out.report.push_back("the multiplier lies outside the kappa ball: no direction qualifies");
        return out;
      }
      A = second_order_operator(phi, sys.x_bar, ms.point);
    }
    const Mat M = Df + A;
    if (const auto faces = polyhedral_faces(K)) {
      for (const Stratum& f : *faces) {
        const ConeSet S = ConeSet::intersect(f.face_closure, ConeSet::preimage(-M, f.normal));
        const auto nz = find_nonzero(S);
        out.report.push_back("face " + f.label + ": " + (nz ? "candidate " + fmt_vec(*nz) : "none"));
        if (nz && search.confirm(*nz)) return out;
      }
      return out;
    }
    // K = J^{-1} Q (x* = 0 and Phi(x) = 0)
    if (K.kind() != SetKind::Preimage || K.child(0).kind() != SetKind::SOC)
      throw Error(ErrorCode::StratumUnsupported, "critical cone outside the supported fragment");
    {
      const auto nz = find_nonzero(ConeSet::intersect(K, ConeSet::span(null_space(M))));
      out.report.push_back(std::string("interior stratum: ") + (nz ? fmt_vec(*nz) : "none"));
      if (nz && search.confirm(*nz)) return out;
    }
    {
      const ConeSet S = ConeSet::intersect(
          ConeSet::span(null_space(J)),
          ConeSet::preimage(-M, ConeSet::linear_image(J.transpose(), ConeSet::neg_soc(J.rows()))));
      const auto nz = find_nonzero(S);
      out.report.push_back(std::string("kernel stratum: ") + (nz ? fmt_vec(*nz) : "none"));
      if (nz && search.confirm(*nz)) return out;
    }
    if (const auto v = scan_soc_boundary(J, M, out.report)) search.confirm(*v);
    return out;
  }

  // multipliers vary with v: K is the subspace ker J
  const Mat U = null_space(J);
  const int d = static_cast<int>(U.cols());
  if (d == 0) {
    out.report.push_back("critical cone is {0}");
    return out;
  }
  if (d == 1) {
    for (double s : {1.0, -1.0}) {
      const Vec v = s * U.col(0);
      const bool hit = search.confirm(v);
      out.report.push_back("kernel direction " + fmt_vec(v) + (hit ? ": witness" : ": none"));
      if (hit) return out;
    }
    return out;
  }
  auto residual = [&](const Vec& v) {
    const GraphDerivativeResult r = graphical_derivative(phi, pair, v, kappa);
    if (!r.critical || r.lambdas.empty()) return std::numeric_limits<double>::infinity();
    if (r.argmin_multipliers.kind != ArgminKind::Singleton)
      return explain_member(r, Vec(-Df * v), 1e-9) ? 0.0 : 1.0;
    return (U * (U.transpose() * (Df * v + r.op * r.lambdas[0]))).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  Vec best_y;
  for (int i = 0; i < kSphereSamples; ++i) {
    const Vec y = halton_sphere(i, d);
    const double r = residual(U * y);
    if (r < best) {
      best = r;
      best_y = y;
    }
  }
  double step = 0.05;
  for (int it = 0; it < 300 && best > 1e-12 && step > 1e-14; ++it) {
    bool improved = false;
    for (int j = 0; j < d; ++j)
      for (double sg : {1.0, -1.0}) {
        Vec y = best_y;
        y(j) += sg * step;
        y.normalize();
        const double r = residual(U * y);
        if (r < best) {
          best = r;
          best_y = y;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  std::ostringstream os;
  os << "kernel sphere: " << kSphereSamples << " samples, best residual " << best;
  out.report.push_back(os.str());
  if (best <= 1e-9) search.confirm(U * best_y);
  return out;
}

SolutionMapDerivative::SolutionMapDerivative(const VariationalSystem& sys, Vec u,
                                             std::optional<double> kappa)
    : sys_(sys), u_(std::move(u)), grad_f_(sys.f->jacobian(sys.x_bar)),
      graph_(*sys.phi, sys.pair(), kappa) {}

bool SolutionMapDerivative::contains(const Vec& v, double tol) const {
  if (!membership(graph_.critical(), v, tol)) return false;
  const GraphDerivativeResult& r = graph_.at(v);
  return r.critical && membership(r.full_set, Vec(u_ - grad_f_ * v), tol);
}

SolutionMapDerivative ds_graphical_derivative(const VariationalSystem& sys, const Vec& u,
                                              std::optional<double> kappa) {
  return SolutionMapDerivative(sys, u, kappa);
}

}  // namespace socva
