#pragma once

// Isolated calmness of S(p) = {x : p in f(x) + N_Gamma(x)} at (p, x):
// search for a nonzero v with 0 in grad f(x) v + DN_Gamma(x, p - f(x))(v).

#include "socva/graph_derivative.hpp"

#include <optional>
#include <string>
#include <vector>

namespace socva {

struct VariationalSystem {
  const SmoothMapOracle* f = nullptr;    // n components on R^n
  const SmoothMapOracle* phi = nullptr;  // m + 1 components on R^n
  Vec p_bar;
  Vec x_bar;

  StationaryPair pair() const;  // (x_bar, p_bar - f(x_bar))
};

enum class Verdict { Calm, NotCalm };
const char* to_string(Verdict v);

struct CalmnessVerdict {
  Verdict verdict = Verdict::Calm;
  std::optional<Vec> witness;  // nonzero v
  Vec lambda;                  // multiplier used with the witness
  Vec normal;                  // element of N_K(v) closing the inclusion
  double residual = 0.0;
  double kappa = 0.0;
  std::string kappa_source;
  bool mscq_verified = false;
  std::vector<std::string> report;  // one line per examined stratum
};

// kappa: asserted MSCQ modulus; kappa_source records where it came from.
CalmnessVerdict check_isolated_calmness(const VariationalSystem& sys, double kappa,
                                        const std::string& kappa_source = "user");

// {v : u in grad f(x) v + DN_Gamma(x, x*)(v)} as a membership predicate.
class SolutionMapDerivative {
 public:
  SolutionMapDerivative(const VariationalSystem& sys, Vec u,
                        std::optional<double> kappa = std::nullopt);
  bool contains(const Vec& v, double tol = kMembershipTol) const;

 private:
  VariationalSystem sys_;
  Vec u_;
  Mat grad_f_;
  TangentGraph graph_;
};

SolutionMapDerivative ds_graphical_derivative(const VariationalSystem& sys, const Vec& u,
                                              std::optional<double> kappa = std::nullopt);

}  // namespace socva
