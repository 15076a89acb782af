#include "socva/cone_sets.hpp"

#include "socva/conic_feasibility.hpp"
#include "socva/soc_geometry.hpp"

#include <cmath>

namespace socva {

struct ConeSet::Node {
  SetKind kind;
  int dim;
  Vec v;
  Mat m;
  std::vector<ConeSet> ch;
};

const char* to_string(SetKind k) {
  switch (k) {
    case SetKind::Empty: return "Empty";
    case SetKind::Zero: return "Zero";
    case SetKind::All: return "All";
    case SetKind::SOC: return "SOC";
    case SetKind::NegSOC: return "NegSOC";
    case SetKind::Halfspace: return "Halfspace";
    case SetKind::Hyperplane: return "Hyperplane";
    case SetKind::Ray: return "Ray";
    case SetKind::FinitelyGenerated: return "FinitelyGenerated";
    case SetKind::Singleton: return "Singleton";
    case SetKind::LinearImage: return "LinearImage";
    case SetKind::Preimage: return "Preimage";
    case SetKind::Sum: return "Sum";
    case SetKind::Intersect: return "Intersect";
    case SetKind::Translate: return "Translate";
  }
  return "Unknown";
}

namespace {

constexpr double kZeroVec = 1e-12;

bool tiny(const Vec& a) { return a.norm() <= kZeroVec; }

// cos of the angle between a and b
double cosine(const Vec& a, const Vec& b) { return a.dot(b) / (a.norm() * b.norm()); }

bool parallel(const Vec& a, const Vec& b) { return std::abs(cosine(a, b)) >= 1.0 - kSimplifyTol; }

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidInput, what);
}

}  // namespace

ConeSet ConeSet::make(SetKind k, int dim, Vec v, Mat m, std::vector<ConeSet> ch) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->dim = dim;
  n->v = std::move(v);
  n->m = std::move(m);
  n->ch = std::move(ch);
  return ConeSet(std::move(n));
}

ConeSet ConeSet::empty(int n) { return make(SetKind::Empty, n, {}, {}, {}); }
ConeSet ConeSet::zero(int n) { return make(SetKind::Zero, n, {}, {}, {}); }
ConeSet ConeSet::all(int n) { return make(SetKind::All, n, {}, {}, {}); }

ConeSet ConeSet::soc(int n) {
  require(n >= 2, "soc: dimension must be at least 2");
  return make(SetKind::SOC, n, {}, {}, {});
}

ConeSet ConeSet::neg_soc(int n) {
  require(n >= 2, "neg_soc: dimension must be at least 2");
  return make(SetKind::NegSOC, n, {}, {}, {});
}

ConeSet ConeSet::halfspace(const Vec& a) {
  const int n = static_cast<int>(a.size());
  if (tiny(a)) return all(n);
  return make(SetKind::Halfspace, n, a, {}, {});
}

ConeSet ConeSet::hyperplane(const Vec& a) {
  const int n = static_cast<int>(a.size());
  if (tiny(a)) return all(n);
  return make(SetKind::Hyperplane, n, a, {}, {});
}

ConeSet ConeSet::ray(const Vec& d) {
  const int n = static_cast<int>(d.size());
  if (tiny(d)) return zero(n);
  return make(SetKind::Ray, n, d, {}, {});
}

ConeSet ConeSet::generated(const Mat& G) {
  const int n = static_cast<int>(G.rows());
  std::vector<int> keep;
  for (int j = 0; j < G.cols(); ++j)
    if (!tiny(G.col(j))) keep.push_back(j);
  if (keep.empty()) return zero(n);
  if (keep.size() == 1) return ray(G.col(keep[0]));
  Mat K(n, keep.size());
  for (size_t c = 0; c < keep.size(); ++c) K.col(c) = G.col(keep[c]);
  return make(SetKind::FinitelyGenerated, n, {}, K, {});
}

ConeSet ConeSet::singleton(const Vec& p) {
  const int n = static_cast<int>(p.size());
  if (p.isZero(0.0)) return zero(n);
  return make(SetKind::Singleton, n, p, {}, {});
}

ConeSet ConeSet::linear_image(const Mat& M, const ConeSet& c) {
  require(M.cols() == c.dim(), "linear_image: dimension mismatch");
  const int n = static_cast<int>(M.rows());
  switch (c.kind()) {
    case SetKind::Empty: return empty(n);
    case SetKind::Zero: return zero(n);
    case SetKind::Singleton: return singleton(M * c.vec());
    case SetKind::Ray: return ray(M * c.vec());
    case SetKind::FinitelyGenerated: return generated(M * c.mat());
    case SetKind::LinearImage: return linear_image(M * c.mat(), c.child(0));
    default: break;
  }
  return make(SetKind::LinearImage, n, {}, M, {c});
}

ConeSet ConeSet::preimage(const Mat& M, const ConeSet& c) {
  require(M.rows() == c.dim(), "preimage: dimension mismatch");
  const int n = static_cast<int>(M.cols());
  switch (c.kind()) {
    case SetKind::Empty: return empty(n);
    case SetKind::All: return all(n);
    case SetKind::Halfspace: return halfspace(M.transpose() * c.vec());
    case SetKind::Hyperplane: return hyperplane(M.transpose() * c.vec());
    case SetKind::Zero: return span(null_space(M));
    case SetKind::Ray: {
      // M x = t d, t >= 0
      const Vec u = c.vec().normalized();
      const Mat PM = M - u * (u.transpose() * M);
      if (PM.norm() <= kRankRel * std::max(M.norm(), 1e-300)) return halfspace(-M.transpose() * u);
      if (numeric_rank(PM) == numeric_rank(M)) return span(null_space(M));
      return intersect(span(null_space(PM)), halfspace(-M.transpose() * u));
    }
    default: break;
  }
  return make(SetKind::Preimage, n, {}, M, {c});
}

ConeSet ConeSet::sum(const ConeSet& a, const ConeSet& b) {
  require(a.dim() == b.dim(), "sum: dimension mismatch");
  const int n = a.dim();
  if (a.kind() == SetKind::Empty || b.kind() == SetKind::Empty) return empty(n);
  if (a.kind() == SetKind::Zero) return b;
  if (b.kind() == SetKind::Zero) return a;
  if (a.kind() == SetKind::All || b.kind() == SetKind::All) return all(n);
  auto gens = [](const ConeSet& s) -> std::optional<Mat> {
    if (s.kind() == SetKind::Ray) return Mat(s.vec());
    if (s.kind() == SetKind::FinitelyGenerated) return s.mat();
    return std::nullopt;
  };
  auto ga = gens(a), gb = gens(b);
  if (ga && gb) {
    Mat G(n, ga->cols() + gb->cols());
    G << *ga, *gb;
    return generated(G);
  }
  if (a.kind() == SetKind::Singleton) return translate(a.vec(), b);
  if (b.kind() == SetKind::Singleton) return translate(b.vec(), a);
  if (a.kind() == SetKind::Translate) return translate(a.vec(), sum(a.child(0), b));
  if (b.kind() == SetKind::Translate) return translate(b.vec(), sum(a, b.child(0)));
  return make(SetKind::Sum, n, {}, {}, {a, b});
}

namespace {

// SOC or NegSOC cut by the hyperplane w-perp, when w is inside +-Q.
std::optional<ConeSet> cone_cut(bool negative, const Vec& w) {
  const int n = static_cast<int>(w.size());
  const double s = scale_of(w) * kSimplifyTol;
  const double w0 = w(0);
  const double r = tail(w).norm();
  if (r < w0 - s || r < -w0 - s) return ConeSet::zero(n);
  Vec flip = w;
  flip.tail(n - 1) = -tail(w);
  if (std::abs(r - w0) <= s)  // w on bd Q
    return negative ? ConeSet::ray(hat(w)) : ConeSet::ray(flip);
  if (std::abs(r + w0) <= s)  // w on bd(-Q)
    return negative ? ConeSet::ray(-hat(w)) : ConeSet::ray(hat(w));
  return std::nullopt;
}

}  // namespace

ConeSet ConeSet::intersect(const ConeSet& a, const ConeSet& b) {
  require(a.dim() == b.dim(), "intersect: dimension mismatch");
  const int n = a.dim();
  const SetKind ka = a.kind(), kb = b.kind();
  if (ka == SetKind::Empty || kb == SetKind::Empty) return empty(n);
  if (ka == SetKind::All) return b;
  if (kb == SetKind::All) return a;
  if (ka == SetKind::Zero && b.is_cone()) return a;
  if (kb == SetKind::Zero && a.is_cone()) return b;

  auto flat = [](SetKind k) { return k == SetKind::Halfspace || k == SetKind::Hyperplane; };
  if (flat(ka) && flat(kb) && parallel(a.vec(), b.vec())) {
    const bool same = cosine(a.vec(), b.vec()) > 0;
    if (ka == SetKind::Hyperplane) return a;
    if (kb == SetKind::Hyperplane) return b;
    return same ? a : hyperplane(a.vec());
  }
  if (ka == SetKind::Ray && flat(kb)) {
    const double c = a.vec().dot(b.vec()) / (a.vec().norm() * b.vec().norm());
    const bool keep = kb == SetKind::Hyperplane ? std::abs(c) <= kSimplifyTol : c <= kSimplifyTol;
    return keep ? a : zero(n);
  }
  if (kb == SetKind::Ray && flat(ka)) return intersect(b, a);
  if ((ka == SetKind::SOC || ka == SetKind::NegSOC) && kb == SetKind::Hyperplane) {
    if (auto c = cone_cut(ka == SetKind::NegSOC, b.vec())) return *c;
  }
  if ((kb == SetKind::SOC || kb == SetKind::NegSOC) && ka == SetKind::Hyperplane) {
    if (auto c = cone_cut(kb == SetKind::NegSOC, a.vec())) return *c;
  }
  return make(SetKind::Intersect, n, {}, {}, {a, b});
}

ConeSet ConeSet::translate(const Vec& p, const ConeSet& c) {
  require(p.size() == c.dim(), "translate: dimension mismatch");
  if (p.isZero(0.0)) return c;
  if (c.kind() == SetKind::Empty) return c;
  if (c.kind() == SetKind::Zero) return singleton(p);
  if (c.kind() == SetKind::Singleton) return singleton(p + c.vec());
  if (c.kind() == SetKind::Translate) return translate(p + c.vec(), c.child(0));
  return make(SetKind::Translate, c.dim(), p, {}, {c});
}

ConeSet ConeSet::affine_solutions(const Mat& M, const Vec& rhs) {
  return preimage(M, singleton(rhs));
}

ConeSet ConeSet::span(const Mat& B) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() == 0 || numeric_rank(B) == 0) return zero(n);
  const int r = numeric_rank(B);
  if (r == n) return all(n);
  if (r == n - 1) return hyperplane(null_space(Mat(B.transpose())).col(0));
  return make(SetKind::LinearImage, n, {}, B, {all(static_cast<int>(B.cols()))});
}

SetKind ConeSet::kind() const { return node_->kind; }
int ConeSet::dim() const { return node_->dim; }
const Vec& ConeSet::vec() const { return node_->v; }
const Mat& ConeSet::mat() const { return node_->m; }
int ConeSet::num_children() const { return static_cast<int>(node_->ch.size()); }
const ConeSet& ConeSet::child(int i) const { return node_->ch.at(i); }
bool ConeSet::is_leaf() const { return node_->ch.empty(); }

bool ConeSet::is_cone() const {
  if (kind() == SetKind::Singleton || kind() == SetKind::Translate || kind() == SetKind::Empty)
    return false;
  for (const auto& c : node_->ch)
    if (!c.is_cone()) return false;
  return true;
}

bool membership(const ConeSet& S, const Vec& v, double tol) {
  if (v.size() != S.dim()) throw Error(ErrorCode::InvalidInput, "membership: dimension mismatch");
  const double s = tol * scale_of(v);
  switch (S.kind()) {
    case SetKind::Empty: return false;
    case SetKind::All: return true;
    case SetKind::Zero: return v.norm() <= s;
    case SetKind::SOC: return dist_to_Q(v) <= s;
    case SetKind::NegSOC: return dist_to_Q(-v) <= s;
    case SetKind::Halfspace: return v.dot(S.vec()) / S.vec().norm() <= s;
    case SetKind::Hyperplane: return std::abs(v.dot(S.vec())) / S.vec().norm() <= s;
    case SetKind::Ray: {
      const Vec& d = S.vec();
      const double t = std::max(0.0, v.dot(d) / d.squaredNorm());
      return (v - t * d).norm() <= s;
    }
    case SetKind::Singleton: return (v - S.vec()).norm() <= s;
    default: break;
  }
  const Lifted L = compile(S);
  if (L.empty) return false;
  return solve_lifted(L, L.M, v - L.b, s).feasible;
}

std::optional<std::pair<Vec, Vec>> decompose_sum(const ConeSet& S, const Vec& v, double tol) {
  if (S.kind() != SetKind::Sum) {
    if (!membership(S, v, tol)) return std::nullopt;
    return std::make_pair(v, Vec(Vec::Zero(v.size())));
  }
  const Lifted L = compile(S);
  if (L.empty) return std::nullopt;
  const FeasResult r = solve_lifted(L, L.M, v - L.b, tol * scale_of(v));
  if (!r.feasible) return std::nullopt;
  const Lifted A = compile(S.child(0));
  const Vec a = A.M * r.z.head(A.nvars) + A.b;
  return std::make_pair(a, Vec(L.M * r.z + L.b - a));
}

ConeSet polar(const ConeSet& S) {
  const int n = S.dim();
  switch (S.kind()) {
    case SetKind::Zero: return ConeSet::all(n);
    case SetKind::All: return ConeSet::zero(n);
    case SetKind::SOC: return ConeSet::neg_soc(n);
    case SetKind::NegSOC: return ConeSet::soc(n);
    case SetKind::Halfspace: return ConeSet::ray(S.vec());
    case SetKind::Ray: return ConeSet::halfspace(S.vec());
    case SetKind::Hyperplane: {
      Mat G(n, 2);
      G << S.vec(), -S.vec();
      return ConeSet::generated(G);
    }
    case SetKind::FinitelyGenerated: {
      const Mat& G = S.mat();
      if (G.cols() == 2 && cosine(G.col(0), G.col(1)) <= -1.0 + kSimplifyTol)
        return ConeSet::hyperplane(G.col(0));
      ConeSet out = ConeSet::halfspace(G.col(0));
      for (int j = 1; j < G.cols(); ++j) out = ConeSet::intersect(out, ConeSet::halfspace(G.col(j)));
      return out;
    }
    case SetKind::Sum: return ConeSet::intersect(polar(S.child(0)), polar(S.child(1)));
    case SetKind::Intersect: return ConeSet::sum(polar(S.child(0)), polar(S.child(1)));
    case SetKind::LinearImage: return ConeSet::preimage(S.mat().transpose(), polar(S.child(0)));
    case SetKind::Preimage: return ConeSet::linear_image(S.mat().transpose(), polar(S.child(0)));
    default: break;
  }
  throw Error(ErrorCode::Unsupported, std::string("polar: not a cone: ") + to_string(S.kind()));
}

ConeSet normal_cone_of(const ConeSet& S, const Vec& v, double tol) {
  if (!membership(S, v, tol)) throw Error(ErrorCode::NotMember, "normal_cone_of: point not in set");
  return ConeSet::intersect(polar(S), ConeSet::hyperplane(v));
}

namespace {

Vec unit_max(const Vec& x) {
  const double m = x.cwiseAbs().maxCoeff();
  return x / m;
}

}  // namespace

std::optional<Vec> find_nonzero(const ConeSet& S, double tol) {
  const int n = S.dim();
  switch (S.kind()) {
    case SetKind::Zero:
    case SetKind::Empty: return std::nullopt;
    case SetKind::All:
    case SetKind::SOC: return Vec(Vec::Unit(n, 0));
    case SetKind::NegSOC: return Vec(-Vec::Unit(n, 0));
    case SetKind::Ray: return unit_max(S.vec());
    case SetKind::Halfspace: return unit_max(-S.vec());
    case SetKind::FinitelyGenerated: return unit_max(S.mat().col(0));
    case SetKind::Hyperplane: {
      const Mat B = null_space(Mat(S.vec().transpose()));
      if (B.cols() == 0) return std::nullopt;
      return unit_max(B.col(0));
    }
    default: break;
  }
  const Lifted L = compile(S);
  if (L.empty) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Mat G = L.M.row(i);
      Vec h(1);
      h(0) = sgn - L.b(i);
      const FeasResult r = solve_lifted(L, G, h, tol);
      if (!r.feasible) continue;
      const Vec x = L.M * r.z + L.b;
      if (x.cwiseAbs().maxCoeff() < 0.5) continue;
      return unit_max(x);
    }
  }
  return std::nullopt;
}

bool structurally_equal(const ConeSet& a, const ConeSet& b, double tol) {
  if (a.kind() != b.kind() || a.dim() != b.dim() || a.num_children() != b.num_children())
    return false;
  switch (a.kind()) {
    case SetKind::Ray:
    case SetKind::Halfspace:
      if (cosine(a.vec(), b.vec()) < 1.0 - tol) return false;
      break;
    case SetKind::Hyperplane:
      if (std::abs(cosine(a.vec(), b.vec())) < 1.0 - tol) return false;
      break;
    case SetKind::Singleton:
    case SetKind::Translate:
      if ((a.vec() - b.vec()).norm() > tol * scale_of(a.vec())) return false;
      break;
    case SetKind::FinitelyGenerated:
    case SetKind::LinearImage:
    case SetKind::Preimage:
      if (a.mat().rows() != b.mat().rows() || a.mat().cols() != b.mat().cols()) return false;
      if ((a.mat() - b.mat()).norm() > tol * std::max(1.0, a.mat().norm())) return false;
      break;
    default: break;
  }
  for (int i = 0; i < a.num_children(); ++i)
    if (!structurally_equal(a.child(i), b.child(i), tol)) return false;
  return true;
}

namespace {

Vec sample_blocks(const Lifted& L, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec z(L.nvars);
  for (int i = 0; i < L.nvars; ++i) z(i) = g(rng);
  for (const auto& b : L.blocks) {
    auto seg = z.segment(b.offset, b.size);
    if (b.kind == BlockKind::NonNeg) seg = seg.cwiseAbs();
    if (b.kind == BlockKind::Soc) {
      const double r = seg.tail(b.size - 1).norm();
      // mix interior and boundary samples
      seg(0) = b.sign * (r + (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3 ? 0.0 : std::abs(g(rng))));
    }
  }
  return z;
}

bool in_blocks(const Lifted& L, const Vec& z, double tol) {
  for (const auto& b : L.blocks) {
    const Vec seg = z.segment(b.offset, b.size);
    if (b.kind == BlockKind::NonNeg && seg.minCoeff() < -tol) return false;
    if (b.kind == BlockKind::Soc && soc_margin(seg, b.sign) < -tol * std::max(1.0, seg.norm()))
      return false;
  }
  return true;
}

}  // namespace

std::optional<Vec> sample_point(const ConeSet& S, std::mt19937_64& rng) {
  const Lifted L = compile(S);
  if (L.empty) return std::nullopt;
  if (L.E.rows() == 0) return Vec(L.M * sample_blocks(L, rng) + L.b);

  const Mat N = null_space(L.E);
  const Vec zp = lstsq(L.E, L.e);
  if ((L.E * zp - L.e).norm() > 1e-9 * scale_of(L.e)) return std::nullopt;
  const double tol = 1e-10;
  if (N.cols() == 0) {
    if (!in_blocks(L, zp, tol)) return std::nullopt;
    return Vec(L.M * zp + L.b);
  }
  // project random cone points onto the affine part
  for (int t = 0; t < 200; ++t) {
    const Vec zk = sample_blocks(L, rng);
    const Vec z = zp + N * (N.transpose() * (zk - zp));
    if (in_blocks(L, z, tol)) return Vec(L.M * z + L.b);
  }
  // perturb a feasible center
  const FeasResult c = solve_lifted(L, Mat::Zero(0, L.nvars), Vec::Zero(0), 1e-9);
  if (!c.feasible) return std::nullopt;
  std::normal_distribution<double> g(0.0, 1.0);
  const double base = std::max(1.0, c.z.norm());
  for (int t = 0; t < 300; ++t) {
    Vec y(N.cols());
    for (int i = 0; i < y.size(); ++i) y(i) = g(rng);
    const double r = base * std::pow(0.5, t % 30);
    const Vec z = c.z + N * (r * y);
    if (in_blocks(L, z, tol)) return Vec(L.M * z + L.b);
  }
  return Vec(L.M * c.z + L.b);
}

bool equal_sets(const ConeSet& A, const ConeSet& B, int dim, int samples, double tol,
                unsigned seed) {
  if (A.dim() != dim || B.dim() != dim) return false;
  if (structurally_equal(A, B)) return true;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const auto a = sample_point(A, rng);
    const auto b = sample_point(B, rng);
    if (a.has_value() != b.has_value()) return false;
    if (a && !membership(B, *a, tol)) return false;
    if (b && !membership(A, *b, tol)) return false;
  }
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    Vec p(dim);
    for (int k = 0; k < dim; ++k) p(k) = g(rng);
    if (membership(A, p, tol) != membership(B, p, tol)) return false;
  }
  return true;
}

}  // namespace socva
