#include "socva/common.hpp"

namespace socva {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::OutsideCone: return "OutsideCone";
    case ErrorCode::InvalidNormal: return "InvalidNormal";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::Undecidable: return "Undecidable";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NotFeasible: return "NotFeasible";
    case ErrorCode::InvalidPair: return "InvalidPair";
    case ErrorCode::DirectionNotCritical: return "DirectionNotCritical";
    case ErrorCode::CertificateFailed: return "CertificateFailed";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::StratumUnsupported: return "StratumUnsupported";
    case ErrorCode::NotApplicable: return "NotApplicable";
  }
  return "Unknown";
}

SvdInfo svd_full(const Mat& A, double rel) {
  SvdInfo out;
  const int r = static_cast<int>(A.rows()), c = static_cast<int>(A.cols());
  if (r == 0 || c == 0) {
    out.U = Mat::Identity(r, r);
    out.V = Mat::Identity(c, c);
    out.s = Vec::Zero(0);
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.s = svd.singularValues();
  const double smax = out.s.size() ? out.s(0) : 0.0;
  // absolute floor: roundoff-level matrices have rank 0
  const double thr = std::max(rel * smax, kRankAbs);
  for (int i = 0; i < out.s.size(); ++i)
    if (out.s(i) > thr && out.s(i) > 0.0) ++out.rank;
  return out;
}

Mat null_space(const Mat& A, double rel) {
  const int c = static_cast<int>(A.cols());
  if (A.rows() == 0) return Mat::Identity(c, c);
  SvdInfo s = svd_full(A, rel);
  return s.V.rightCols(c - s.rank);
}

Mat range_basis(const Mat& A, double rel) {
  if (A.cols() == 0) return Mat::Zero(A.rows(), 0);
  SvdInfo s = svd_full(A, rel);
  return s.U.leftCols(s.rank);
}

int numeric_rank(const Mat& A, double rel) { return svd_full(A, rel).rank; }

Vec lstsq(const Mat& A, const Vec& b, double rel) {
  const int c = static_cast<int>(A.cols());
  if (A.rows() == 0 || c == 0) return Vec::Zero(c);
  SvdInfo s = svd_full(A, rel);
  Vec y = Vec::Zero(c);
  for (int i = 0; i < s.rank; ++i) y += (s.U.col(i).dot(b) / s.s(i)) * s.V.col(i);
  return y;
}

Mat vstack(const Mat& A, const Mat& B) {
  if (A.rows() == 0) return B;
  if (B.rows() == 0) return A;
  Mat out(A.rows() + B.rows(), A.cols());
  out << A, B;
  return out;
}

Vec vcat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace socva
