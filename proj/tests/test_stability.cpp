#include "socva/golden.hpp"
#include "socva/stability.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace socva;
using namespace socva::testing;

namespace {

struct Reference {
  QuadraticMap phi = reference_phi();
  QuadraticMap f = reference_f();

  VariationalSystem system(int i) const {
    const auto c = calmness_cases()[i];
    return {&f, &phi, c.x_star, c.x};
  }
};

// Re-derive 0 in grad f v + op(lambda) v + normal at the witness.
double witness_residual(const Reference& r, int i, const CalmnessVerdict& cv, double s) {
  const VariationalSystem sys = r.system(i);
  const Vec v = s * *cv.witness;
  const Mat Df = r.f.jacobian(sys.x_bar);
  const Vec w = -Df * v;
  const auto g = graphical_derivative(r.phi, sys.pair(), v, cv.kappa);
  const auto parts = explain_member(g, w, 1e-9);
  if (!parts) return 1e300;
  return (parts->first + parts->second - w).norm();
}

// Solutions of p in f(x) + N_Gamma(x) for Gamma = {x2 >= 0}, f = (x1, x2^2).
std::vector<Vec> direct_solutions(const Vec& p) {
  std::vector<Vec> out;
  if (p(1) > 0) out.push_back(v2(p(0), std::sqrt(p(1))));
  if (p(1) <= 0) out.push_back(v2(p(0), 0));
  return out;
}

}  // namespace

TEST(Stability, ReferenceVerdicts) {
  const Reference r;
  const Verdict want[] = {Verdict::NotCalm, Verdict::Calm, Verdict::NotCalm, Verdict::Calm, Verdict::Calm};
  for (int i = 0; i < 5; ++i) {
    const CalmnessVerdict cv = check_isolated_calmness(r.system(i), kSqrt2);
    EXPECT_EQ(cv.verdict, want[i]) << i;
    EXPECT_EQ(cv.kappa_source, "user");
    EXPECT_FALSE(cv.report.empty());
    EXPECT_EQ(cv.witness.has_value(), want[i] == Verdict::NotCalm);
  }
}

TEST(Stability, WitnessesReverifyAndScale) {
  const Reference r;
  for (int i : {0, 2}) {
    const CalmnessVerdict cv = check_isolated_calmness(r.system(i), kSqrt2);
    ASSERT_TRUE(cv.witness);
    EXPECT_GT(cv.witness->norm(), 0);
    EXPECT_LE(cv.residual, 1e-8);
    EXPECT_LE(witness_residual(r, i, cv, 1.0), 1e-8);
    EXPECT_LE(witness_residual(r, i, cv, 2.0), 1e-8);
  }
}

TEST(Stability, SolutionMapDerivative) {
  const Reference r;
  const auto ds2 = ds_graphical_derivative(r.system(1), v2(0, 0));
  EXPECT_TRUE(ds2.contains(v2(0, 0)));
  for (const Vec& v : {v2(1, 0), v2(0, 1), v2(-1, 0.5), v2(0, -1)}) EXPECT_FALSE(ds2.contains(v));

  const auto ds1 = ds_graphical_derivative(r.system(0), v2(0, 0));
  EXPECT_TRUE(ds1.contains(v2(0, 1)));
  EXPECT_TRUE(ds1.contains(v2(0, 3)));
  EXPECT_FALSE(ds1.contains(v2(1, 1)));
}

TEST(Stability, UnconstrainedLinearSystem) {
  QuadComponent head;
  head.c = 1.0;
  head.g = Vec::Zero(2);
  head.H = Mat::Zero(2, 2);
  QuadComponent rest = head;
  rest.c = 0.0;
  const QuadraticMap phi(2, {head, rest, rest});
  Mat A(2, 2);
  A << 2, 1, 0, 3;
  std::vector<QuadComponent> fc;
  for (int i = 0; i < 2; ++i) {
    QuadComponent q;
    q.g = A.row(i).transpose();
    q.H = Mat::Zero(2, 2);
    fc.push_back(q);
  }
  const QuadraticMap f(2, fc);
  const VariationalSystem sys{&f, &phi, Vec::Zero(2), Vec::Zero(2)};
  const Vec u = v2(1, -2);
  const auto ds = ds_graphical_derivative(sys, u);
  const Vec sol = A.inverse() * u;
  EXPECT_TRUE(ds.contains(sol));
  EXPECT_FALSE(ds.contains(sol + v2(0.1, 0)));
  EXPECT_FALSE(ds.contains(v2(0, 0)));
  EXPECT_EQ(check_isolated_calmness(sys, 1.0).verdict, Verdict::Calm);
}

TEST(Stability, EmpiricalCalmnessCase2) {
  const Vec pbar = v2(0, -1), xbar = v2(0, 0);
  std::mt19937_64 rng(61);
  auto max_ratio = [&](double r) {
    double best = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vec p = pbar + r * gaussian(2, rng);
      for (const Vec& x : direct_solutions(p)) best = std::max(best, (x - xbar).norm() / (p - pbar).norm());
    }
    return best;
  };
  const double coarse = max_ratio(1e-1), fine = max_ratio(1e-3);
  EXPECT_LE(coarse, 1.0 + 1e-12);
  EXPECT_LE(fine, 1.0 + 1e-12);
  // not calm at case 1: x2 = sqrt(p2) grows faster than p2
  double ratio = 0.0;
  for (double t : {1e-2, 1e-4, 1e-6}) ratio = std::max(ratio, direct_solutions(v2(0, t))[0].norm() / t);
  EXPECT_GT(ratio, 100.0);
}

TEST(Stability, InvalidSystemRejected) {
  const Reference r;
  const VariationalSystem bad{&r.f, &r.phi, v2(0, 1), v2(0, 0)};
  EXPECT_THROW(check_isolated_calmness(bad, kSqrt2), Error);
}
