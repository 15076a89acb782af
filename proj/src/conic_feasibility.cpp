#include "socva/conic_feasibility.hpp"

#include "socva/soc_geometry.hpp"

#include <cmath>
#include <limits>

namespace socva {

namespace {

Lifted leaf_free(const Mat& M) {
  Lifted L;
  L.dim = static_cast<int>(M.rows());
  L.nvars = static_cast<int>(M.cols());
  if (L.nvars > 0) L.blocks.push_back({BlockKind::Free, 0, L.nvars, 1.0});
  L.M = M;
  L.b = Vec::Zero(L.dim);
  L.E = Mat::Zero(0, L.nvars);
  L.e = Vec::Zero(0);
  return L;
}

Lifted leaf_nonneg(const Mat& G) {
  Lifted L = leaf_free(G);
  for (auto& b : L.blocks) b.kind = BlockKind::NonNeg;
  return L;
}

// Basis of a-perp, as columns.
Mat perp_basis(const Vec& a) {
  Mat row = a.transpose();
  return null_space(row);
}

// Places `part` next to the variables of `acc`; returns the column offset.
int append_vars(Lifted& acc, const Lifted& part) {
  const int off = acc.nvars;
  for (Block b : part.blocks) {
    b.offset += off;
    acc.blocks.push_back(b);
  }
  acc.nvars += part.nvars;
  Mat E(acc.E.rows() + part.E.rows(), acc.nvars);
  E.setZero();
  if (acc.E.rows() > 0) E.topLeftCorner(acc.E.rows(), off) = acc.E;
  if (part.E.rows() > 0) E.bottomRightCorner(part.E.rows(), part.nvars) = part.E;
  acc.E = E;
  acc.e = vcat(acc.e, part.e);
  Mat M(acc.M.rows(), acc.nvars);
  M.setZero();
  if (off > 0) M.leftCols(off) = acc.M;
  acc.M = M;
  return off;
}

Lifted empty_lifted(int n) {
  Lifted L;
  L.dim = n;
  L.empty = true;
  L.M = Mat::Zero(n, 0);
  L.b = Vec::Zero(n);
  L.E = Mat::Zero(0, 0);
  L.e = Vec::Zero(0);
  return L;
}

}  // namespace

Lifted compile(const ConeSet& S) {
  const int n = S.dim();
  switch (S.kind()) {
    case SetKind::Empty: return empty_lifted(n);
    case SetKind::Zero: return leaf_free(Mat::Zero(n, 0));
    case SetKind::All: return leaf_free(Mat::Identity(n, n));
    case SetKind::SOC:
    case SetKind::NegSOC: {
      Lifted L = leaf_free(Mat::Identity(n, n));
      L.blocks[0].kind = BlockKind::Soc;
      L.blocks[0].sign = S.kind() == SetKind::SOC ? 1.0 : -1.0;
      return L;
    }
    case SetKind::Hyperplane: return leaf_free(perp_basis(S.vec()));
    case SetKind::Halfspace: {
      Lifted L = leaf_free(perp_basis(S.vec()));
      Lifted r = leaf_nonneg(-S.vec());
      const int off = append_vars(L, r);
      L.M.middleCols(off, 1) = r.M;
      return L;
    }
    case SetKind::Ray: return leaf_nonneg(S.vec());
    case SetKind::FinitelyGenerated: return leaf_nonneg(S.mat());
    case SetKind::Singleton: {
      Lifted L = leaf_free(Mat::Zero(n, 0));
      L.b = S.vec();
      return L;
    }
    case SetKind::LinearImage: {
      Lifted L = compile(S.child(0));
      if (L.empty) return empty_lifted(n);
      L.M = S.mat() * L.M;
      L.b = S.mat() * L.b;
      L.dim = n;
      return L;
    }
    case SetKind::Translate: {
      Lifted L = compile(S.child(0));
      if (L.empty) return empty_lifted(n);
      L.b += S.vec();
      return L;
    }
    case SetKind::Sum: {
      Lifted A = compile(S.child(0));
      Lifted B = compile(S.child(1));
      if (A.empty || B.empty) return empty_lifted(n);
      const int off = append_vars(A, B);
      A.M.middleCols(off, B.nvars) = B.M;
      A.b += B.b;
      return A;
    }
    case SetKind::Intersect: {
      Lifted A = compile(S.child(0));
      Lifted B = compile(S.child(1));
      if (A.empty || B.empty) return empty_lifted(n);
      const Mat MA = A.M;
      const int off = append_vars(A, B);
      // M_A zA + b_A = M_B zB + b_B
      Mat link(n, A.nvars);
      link.setZero();
      link.leftCols(off) = MA;
      link.middleCols(off, B.nvars) = -B.M;
      A.E = vstack(A.E, link);
      A.e = vcat(A.e, B.b - A.b);
      return A;
    }
    case SetKind::Preimage: {
      // variables (x free, z_C); output x; constraint P x = M_C z + b_C
      const Mat& P = S.mat();
      Lifted C = compile(S.child(0));
      if (C.empty) return empty_lifted(n);
      Lifted L = leaf_free(Mat::Identity(n, n));
      const int off = append_vars(L, C);
      Mat link(P.rows(), L.nvars);
      link.setZero();
      link.leftCols(n) = P;
      link.middleCols(off, C.nvars) = -C.M;
      L.E = vstack(L.E, link);
      L.e = vcat(L.e, C.b);
      return L;
    }
  }
  throw Error(ErrorCode::Unsupported, "compile: unknown set kind");
}

double soc_margin(const Vec& x, double sign) {
  return sign * x(0) - tail(x).norm();
}

MarginResult max_soc_margin(const Vec& p_in, const Mat& A_in, double sign, double slack, double target) {
  MarginResult out;
  const int d = static_cast<int>(p_in.size());
  const int k = static_cast<int>(A_in.cols());
  Vec p = p_in;
  Mat A = A_in;
  if (sign < 0) {
    p(0) = -p(0);
    A.row(0) = -A.row(0);
  }
  out.y = Vec::Zero(k);
  const Vec pr = p.tail(d - 1);
  if (k == 0) {
    out.sup = p(0) - pr.norm();
    return out;
  }
  const Vec a0 = A.row(0).transpose();
  const Mat Ar = A.bottomRows(d - 1);
  const double scale = std::max({1.0, p.norm(), A.norm()});

  SvdInfo sv = svd_full(Ar, 1e-12);
  const int r = sv.rank;
  const Mat Vr = sv.V.leftCols(r);
  const Vec dnull = a0 - Vr * (Vr.transpose() * a0);
  if (dnull.norm() > 1e-12 * std::max(1.0, a0.norm())) {
    // head grows along a direction invisible to the tail
    out.unbounded = true;
    out.sup = std::numeric_limits<double>::infinity();
    const Vec dir = dnull / dnull.norm();
    const double slope = a0.dot(dir);
    const double t = (pr.norm() - p(0) + 1.0) / slope;
    out.y = std::max(t, 0.0) * dir;
    return out;
  }
  const Mat Ur = sv.U.leftCols(r);
  Vec u = Vec::Zero(d - 1);
  for (int i = 0; i < r; ++i) u += (sv.V.col(i).dot(a0) / sv.s(i)) * sv.U.col(i);
  const Vec ppar = Ur * (Ur.transpose() * pr);
  const double a = (pr - ppar).norm();
  const double base = p(0) - u.dot(pr);
  const double nu = u.norm();
  auto y_from_r = [&](const Vec& rr) {
    Vec y = Vec::Zero(k);
    const Vec rhs = rr - ppar;
    for (int i = 0; i < r; ++i) y += (sv.U.col(i).dot(rhs) / sv.s(i)) * sv.V.col(i);
    return y;
  };
  const double eps = 1e-12;
  if (nu > 1.0 + eps) {
    out.unbounded = true;
    out.sup = std::numeric_limits<double>::infinity();
    const double s = std::max(0.0, (1.0 + a - base) / (nu - 1.0));
    out.y = y_from_r((s / nu) * u);
    return out;
  }
  if (nu < 1.0 - eps) {
    const double q = std::sqrt(1.0 - nu * nu);
    out.sup = base - a * q;
    if (nu > 0.0) out.y = y_from_r((a / q) * u);
    else out.y = y_from_r(Vec::Zero(d - 1));
    return out;
  }
  // ||u|| = 1: sup = base, attained only when the affine tail passes
  // through the range of A_r
  out.sup = base;
  if (a <= 1e-12 * scale) {
    out.y = y_from_r(Vec::Zero(d - 1));
    return out;
  }
  out.attained = false;
  // margin along s*u/|u| is base + s - sqrt(a^2 + s^2) ~ base - a^2/(2s)
  double s = a * a / slack + 1.0;
  if (target < base - slack) {
    // shortest s with margin >= target: s + sqrt(a^2 + s^2) = a^2 / (base - target)
    const double c = a * a / (base - target);
    s = c > a ? (c * c - a * a) / (2.0 * c) * (1.0 + 1e-9) : 0.0;
  }
  out.y = y_from_r((s / nu) * u);
  return out;
}

Vec nnls(const Mat& A, const Vec& b, int max_iter) {
  const int k = static_cast<int>(A.cols());
  Vec x = Vec::Zero(k);
  if (k == 0) return x;
  if (max_iter < 0) max_iter = std::max(100 * k, 50);
  std::vector<bool> passive(k, false);
  const double tolw = 1e-13 * std::max(1.0, A.norm()) * std::max(1.0, b.norm());
  Vec w = A.transpose() * (b - A * x);

  auto solve_passive = [&]() {
    std::vector<int> idx;
    for (int j = 0; j < k; ++j)
      if (passive[j]) idx.push_back(j);
    Mat Ap(A.rows(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
    Vec sp = lstsq(Ap, b, 1e-13);
    Vec s = Vec::Zero(k);
    for (size_t c = 0; c < idx.size(); ++c) s(idx[c]) = sp(c);
    return s;
  };

  for (int it = 0; it < max_iter; ++it) {
    int t = -1;
    double best = tolw;
    for (int j = 0; j < k; ++j)
      if (!passive[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    if (t < 0) break;
    passive[t] = true;
    Vec s = solve_passive();
    int inner = 0;
    while (inner++ < 3 * k + 3) {
      double alpha = 1.0;
      bool any = false;
      for (int j = 0; j < k; ++j)
        if (passive[j] && s(j) <= 0.0) {
          any = true;
          const double den = x(j) - s(j);
          const double a = den > 0 ? x(j) / den : 0.0;
          alpha = std::min(alpha, a);
        }
      if (!any) break;
      x += alpha * (s - x);
      for (int j = 0; j < k; ++j)
        if (passive[j] && x(j) <= 1e-15) {
          passive[j] = false;
          x(j) = 0.0;
        }
      s = solve_passive();
    }
    x = s;
    for (int j = 0; j < k; ++j)
      if (x(j) < 0) x(j) = 0.0;
    w = A.transpose() * (b - A * x);
  }
  return x;
}

Vec project_block(const Block& blk, const Vec& z) {
  switch (blk.kind) {
    case BlockKind::Free: return z;
    case BlockKind::NonNeg: return z.cwiseMax(0.0);
    case BlockKind::Soc: return blk.sign > 0 ? project(z) : project_neg(z);
  }
  return z;
}

namespace {

FeasResult alternating(const Lifted& L, const Mat& G, const Vec& h, double tol) {
  FeasResult out;
  out.exact = false;
  const int nv = L.nvars;
  SvdInfo sv = svd_full(G, 1e-12);
  auto proj_aff = [&](const Vec& z) {
    const Vec r = G * z - h;
    Vec corr = Vec::Zero(nv);
    for (int i = 0; i < sv.rank; ++i) corr += (sv.U.col(i).dot(r) / sv.s(i)) * sv.V.col(i);
    return Vec(z - corr);
  };
  auto proj_K = [&](const Vec& z) {
    Vec out_z = z;
    for (const auto& b : L.blocks)
      out_z.segment(b.offset, b.size) = project_block(b, z.segment(b.offset, b.size));
    return out_z;
  };
  Vec z = proj_aff(Vec::Zero(nv));
  double gap = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Vec zk = proj_K(z);
    const Vec za = proj_aff(zk);
    gap = (za - zk).norm();
    z = za;
    if (gap <= 0.1 * tol) break;
  }
  const Vec zk = proj_K(z);
  out.z = zk;
  out.residual = (G * zk - h).norm();
  out.feasible = out.residual <= tol;
  return out;
}

constexpr int kMaxActiveEnum = 10;

// One cone block, everything else free.
FeasResult single_soc(const Block& sb, const Mat& G, const Vec& h, double tol) {
  FeasResult out;
  const Vec zp = lstsq(G, h, 1e-12);
  const double cres = (G * zp - h).norm();
  if (cres > tol) {
    out.z = zp;
    out.residual = cres;
    out.feasible = false;
    return out;
  }
  const Mat Nb = null_space(G, 1e-12);
  const Vec p = zp.segment(sb.offset, sb.size);
  const Mat A = Nb.middleRows(sb.offset, sb.size);
  MarginResult mr = max_soc_margin(p, A, sb.sign);
  out.z = zp + Nb * mr.y;
  // clean the cone block onto the cone so callers get an honest point
  const Vec zs = out.z.segment(sb.offset, sb.size);
  const double marg = soc_margin(zs, sb.sign);
  const double s = std::max(1.0, zs.norm());
  out.feasible = mr.unbounded || mr.sup >= -tol * s;
  out.residual = std::max(cres, std::max(0.0, -marg));
  if (out.feasible && marg < 0) {
    out.z.segment(sb.offset, sb.size) = project_block(sb, zs);
    out.residual = (G * out.z - h).norm();
  }
  return out;
}

}  // namespace

FeasResult solve_lifted(const Lifted& L, const Mat& Gx, const Vec& hx, double tol) {
  FeasResult out;
  if (L.empty) {
    out.feasible = false;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  const Mat G = vstack(L.E, Gx);
  const Vec h = vcat(L.e, hx);
  const int nv = L.nvars;
  out.z = Vec::Zero(nv);
  if (G.rows() == 0) {
    out.feasible = true;
    return out;
  }

  std::vector<int> freec, nonneg;
  std::vector<const Block*> socs;
  for (const auto& b : L.blocks) {
    for (int j = 0; j < b.size; ++j) {
      if (b.kind == BlockKind::Free) freec.push_back(b.offset + j);
      if (b.kind == BlockKind::NonNeg) nonneg.push_back(b.offset + j);
    }
    if (b.kind == BlockKind::Soc) socs.push_back(&b);
  }
  auto cols = [&](const std::vector<int>& idx) {
    Mat C(G.rows(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c) C.col(c) = G.col(idx[c]);
    return C;
  };

  if (socs.empty()) {
    const Mat GF = cols(freec);
    Vec zN = Vec::Zero(nonneg.size());
    if (!nonneg.empty()) {
      const Mat GN = cols(nonneg);
      Mat P = Mat::Identity(G.rows(), G.rows());
      if (!freec.empty()) {
        const Mat U = range_basis(GF, 1e-12);
        P -= U * U.transpose();
      }
      zN = nnls(P * GN, P * h);
      for (size_t c = 0; c < nonneg.size(); ++c) out.z(nonneg[c]) = zN(c);
    }
    if (!freec.empty()) {
      const Vec zF = lstsq(GF, h - G * out.z, 1e-12);
      for (size_t c = 0; c < freec.size(); ++c) out.z(freec[c]) = zF(c);
    }
    out.residual = (G * out.z - h).norm();
    out.feasible = out.residual <= tol;
    return out;
  }

  if (socs.size() == 1 && nonneg.empty()) return single_soc(*socs[0], G, h, tol);

  if (socs.size() == 1 && nonneg.size() <= kMaxActiveEnum) {
    // enumerate which nonnegative variables sit at zero; the maximizer of
    // the cone margin on that slice must respect the remaining signs
    const int k = static_cast<int>(nonneg.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
      Mat Gm = G;
      Vec hm = h;
      for (int j = 0; j < k; ++j) {
        if (!(mask >> j & 1)) continue;
        Mat row = Mat::Zero(1, nv);
        row(0, nonneg[j]) = 1.0;
        Gm = vstack(Gm, row);
        hm = vcat(hm, Vec::Zero(1));
      }
      FeasResult r = single_soc(*socs[0], Gm, hm, tol);
      if (!r.feasible) continue;
      const double s = std::max(1.0, r.z.norm());
      bool signs = true;
      for (int j : nonneg) signs = signs && r.z(j) >= -tol * s;
      if (!signs) continue;
      for (int j : nonneg) r.z(j) = std::max(r.z(j), 0.0);
      r.residual = (G * r.z - h).norm();
      if (r.residual <= tol) return r;
    }
  }

  return alternating(L, G, h, tol);
}

}  // namespace socva
