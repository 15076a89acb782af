#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace socva {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidInput,
  OutsideCone,
  InvalidNormal,
  NotMember,
  Unsupported,
  Undecidable,
  NoRoot,
  NotFeasible,
  InvalidPair,
  DirectionNotCritical,
  CertificateFailed,
  GridTooCoarse,
  StratumUnsupported,
  NotApplicable,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline double scale_of(const Vec& v) { return std::max(1.0, v.norm()); }

// Rank threshold used across the library: singular values below
// max(kRankRel * sigma_max, kRankAbs) count as zero.
inline constexpr double kRankRel = 1e-10;
inline constexpr double kRankAbs = 1e-13;

struct SvdInfo {
  Mat U;      // left singular vectors (all)
  Vec s;      // singular values, descending
  Mat V;      // right singular vectors (all)
  int rank = 0;
};

SvdInfo svd_full(const Mat& A, double rel = kRankRel);

// Orthonormal basis of ker A (A has `cols` columns even when it has no rows).
Mat null_space(const Mat& A, double rel = kRankRel);
// Orthonormal basis of range A.
Mat range_basis(const Mat& A, double rel = kRankRel);
int numeric_rank(const Mat& A, double rel = kRankRel);
// Minimum-norm least-squares solution.
Vec lstsq(const Mat& A, const Vec& b, double rel = kRankRel);

Mat vstack(const Mat& A, const Mat& B);
Vec vcat(const Vec& a, const Vec& b);

}  // namespace socva
