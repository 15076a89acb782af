#include "socva/graph_derivative.hpp"

#include <cmath>

namespace socva {

namespace {

// {lambda : ||lambda|| <= r}
ConeSet ball(int k, double r) {
  Mat M = Mat::Zero(k + 1, k);
  M.bottomRows(k) = Mat::Identity(k, k);
  Vec shift = Vec::Zero(k + 1);
  shift(0) = -r;
  return ConeSet::preimage(M, ConeSet::translate(shift, ConeSet::soc(k + 1)));
}

Mat direction_operator(const SmoothMapOracle& phi, const Vec& x, const Vec& v) {
  const int k = phi.components();
  Mat op(phi.n(), k);
  for (int i = 0; i < k; ++i) op.col(i) = second_order_operator(phi, x, Vec::Unit(k, i)) * v;
  return op;
}

}  // namespace

ConeSet graphical_derivative_zero_star(const SmoothMapOracle& phi, const Vec& x, const Vec& v) {
  const Vec F = phi.value(x);
  if (classify(F) == PointClass::Outside) throw Error(ErrorCode::NotFeasible, "Phi(x) is outside Q");
  const Mat J = phi.jacobian(x);
  if (!membership(ConeSet::preimage(J, tangent_cone_Q(F)), v)) return ConeSet::empty(phi.n());
  return ConeSet::linear_image(J.transpose(),
                               ConeSet::intersect(normal_cone_Q(F), ConeSet::hyperplane(J * v)));
}

GraphDerivativeResult graphical_derivative(const SmoothMapOracle& phi, const StationaryPair& pair,
                                           const Vec& v, std::optional<double> kappa) {
  const MultiplierSet ms = validate_pair(phi, pair);
  const int n = phi.n();
  const int k = phi.components();
  GraphDerivativeResult r;
  r.v = v;
  r.affine_part = r.normal_part = r.full_set = ConeSet::empty(n);
  r.argmin_multipliers.argmin = ConeSet::empty(k);
  r.op = direction_operator(phi, pair.x, v);
  if (!membership(critical_cone(phi, pair), v)) {
    r.note = "direction is not critical";
    return r;
  }
  r.critical = true;
  r.normal_part = normal_cone_to_critical(phi, pair, ms.relint, v);
  const bool zero_star = pair.x_star.norm() <= 1e-12;
  LpOutcome lp = solve_lp(multiplier_lp(phi, pair, v));
  r.argmin_multipliers = lp;

  if (lp.status != LpStatus::Optimal || !lp.attained) {
    if (zero_star) {
      // the closed form needs no multiplier program
      r.affine_part = ConeSet::zero(n);
      r.full_set = graphical_derivative_zero_star(phi, pair.x, v);
      r.lambdas.push_back(Vec::Zero(k));
      r.note = "multiplier program not solvable; closed form for x* = 0 used";
    } else {
      r.note = std::string("multiplier program ") + to_string(lp.status);
    }
    return r;
  }

  const double radius = kappa ? *kappa * pair.x_star.norm() : 0.0;
  ConeSet arg = lp.argmin;
  if (lp.kind == ArgminKind::Singleton) {
    if (kappa && lp.point.norm() > radius * (1 + 1e-9) + 1e-9) {
      r.note = "argmin multiplier outside the kappa ball";
      return r;
    }
    r.lambdas.push_back(lp.point);
    r.affine_part = ConeSet::singleton(r.op * lp.point);
  } else {
    if (kappa) arg = ConeSet::intersect(arg, ball(k, radius));
    r.lambdas.push_back(lp.kind == ArgminKind::Ray ? Vec(Vec::Zero(k)) : lp.point);
    if (lp.kind == ArgminKind::Ray && !kappa) r.lambdas.push_back(lp.point);
    r.affine_part = ConeSet::linear_image(r.op, arg);
  }
  r.full_set = ConeSet::sum(r.affine_part, r.normal_part);
  return r;
}

std::optional<std::pair<Vec, Vec>> explain_member(const GraphDerivativeResult& r, const Vec& w,
                                                  double tol) {
  const int n = static_cast<int>(w.size());
  if (!r.critical) return std::nullopt;
  if (r.affine_part.kind() == SetKind::Singleton || r.affine_part.kind() == SetKind::Zero) {
    const Vec a = r.affine_part.kind() == SetKind::Zero ? Vec(Vec::Zero(n)) : r.affine_part.vec();
    if (!membership(r.normal_part, w - a, tol)) return std::nullopt;
    return std::make_pair(a, Vec(w - a));
  }
  if (r.full_set.kind() == SetKind::Sum) return decompose_sum(r.full_set, w, tol);
  if (r.normal_part.kind() == SetKind::Zero) {
    if (!membership(r.affine_part, w, tol)) return std::nullopt;
    return std::make_pair(w, Vec(Vec::Zero(n)));
  }
  return decompose_sum(ConeSet::sum(r.affine_part, r.normal_part), w, tol);
}

std::optional<std::vector<Stratum>> polyhedral_faces(const ConeSet& K) {
  const int n = K.dim();
  std::vector<Stratum> out;
  auto add = [&](std::string label, ConeSet closure, Vec relint, ConeSet normal) {
    Stratum s;
    s.label = std::move(label);
    s.face_closure = std::move(closure);
    s.relint = std::move(relint);
    s.normal = std::move(normal);
    s.affine = Mat::Zero(n, n);
    out.push_back(std::move(s));
  };
  auto nonzero_in = [&](const Mat& basis) {
    return basis.cols() > 0 ? Vec(basis.col(0)) : Vec(Vec::Zero(n));
  };
  switch (K.kind()) {
    case SetKind::All: add("whole space", K, Vec::Zero(n), ConeSet::zero(n)); break;
    case SetKind::Zero: add("origin", K, Vec::Zero(n), ConeSet::all(n)); break;
    case SetKind::Hyperplane: {
      const Vec& a = K.vec();
      add("subspace", K, nonzero_in(null_space(Mat(a.transpose()))), ConeSet::span(Mat(a)));
      break;
    }
    case SetKind::LinearImage:
      if (K.child(0).kind() != SetKind::All) return std::nullopt;
      add("subspace", K, nonzero_in(range_basis(K.mat())),
          ConeSet::span(null_space(Mat(K.mat().transpose()))));
      break;
    case SetKind::Halfspace: {
      const Vec& a = K.vec();
      add("interior", K, Vec(-a / a.norm()), ConeSet::zero(n));
      add("boundary", ConeSet::hyperplane(a), nonzero_in(null_space(Mat(a.transpose()))),
          ConeSet::ray(a));
      break;
    }
    case SetKind::Ray: {
      const Vec& d = K.vec();
      add("origin", ConeSet::zero(n), Vec::Zero(n), ConeSet::halfspace(d));
      add("open ray", K, Vec(d / d.norm()), ConeSet::hyperplane(d));
      break;
    }
    default: return std::nullopt;
  }
  return out;
}

TangentGraph::TangentGraph(const SmoothMapOracle& phi, StationaryPair pair,
                           std::optional<double> kappa)
    : phi_(phi), pair_(std::move(pair)), kappa_(kappa) {
  const MultiplierSet ms = validate_pair(phi_, pair_);
  K_ = critical_cone(phi_, pair_);
  strata_ = polyhedral_faces(K_);
  if (!strata_) return;
  const bool zero_star = pair_.x_star.norm() <= 1e-12;
  for (Stratum& s : *strata_) {
    if (zero_star || s.relint.norm() == 0.0) {
      s.exact = true;
      continue;
    }
    const GraphDerivativeResult& r = at(s.relint);
    if (r.argmin_multipliers.kind == ArgminKind::Singleton) {
      s.affine = second_order_operator(phi_, pair_.x, r.argmin_multipliers.point);
      s.exact = ms.kind == MultiplierKind::Singleton;
    }
  }
}

const GraphDerivativeResult& TangentGraph::at(const Vec& v) const {
  std::vector<double> key(v.data(), v.data() + v.size());
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, graphical_derivative(phi_, pair_, v, kappa_)).first;
  return it->second;
}

bool TangentGraph::contains(const Vec& v, const Vec& v_star, double tol) const {
  if (!membership(K_, v, tol)) return false;
  const GraphDerivativeResult& r = at(v);
  if (!r.critical) return false;
  return membership(r.full_set, v_star, tol);
}

GraphProjector halfspace_graph_projector(const Vec& a_in) {
  const Vec a = a_in.normalized();
  return [a](const Vec& x, const Vec& xs) {
    const int n = static_cast<int>(x.size());
    const double al = a.dot(x), be = a.dot(xs);
    const Vec xp = x - al * a;
    // (al, be) onto {al >= 0, be <= 0, al * be = 0}
    const double a1 = std::max(al, 0.0), d1 = (al - a1) * (al - a1) + be * be;
    const double b2 = std::min(be, 0.0), d2 = al * al + (be - b2) * (be - b2);
    Vec out(2 * n);
    if (d1 <= d2) {
      out.head(n) = xp + a1 * a;
      out.tail(n) = Vec::Zero(n);
    } else {
      out.head(n) = xp;
      out.tail(n) = b2 * a;
    }
    return out;
  };
}

std::vector<TangentSample> sample_tangent_oracle(const GraphProjector& proj,
                                                 const StationaryPair& pair, int samples,
                                                 double t_max, unsigned seed) {
  const int n = static_cast<int>(pair.x.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  const Vec base = vcat(pair.x, pair.x_star);
  std::vector<TangentSample> out;
  out.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    Vec d = Vec::Zero(2 * n);
    if (s > 0) {
      for (int i = 0; i < 2 * n; ++i) d(i) = gauss(rng);
      d.normalize();
    }
    const double t = t_max * std::pow(10.0, -unif(rng));
    const Vec p = base + t * d;
    const Vec q = (proj(p.head(n), p.tail(n)) - base) / t;
    out.push_back({q.head(n), q.tail(n), t});
  }
  return out;
}

}  // namespace socva
