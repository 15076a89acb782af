#include "socva/epi2.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace socva;
using namespace socva::testing;

namespace {

double formula(const Vec& xbar, const Vec& ybar, const Vec& v) {
  const ExtendedReal e = epi_second_derivative(xbar, ybar, v);
  EXPECT_TRUE(e.is_finite());
  return e.value;
}

// Random element of the hyperplane {u : <u, a> = 0}.
Vec in_hyperplane(const Vec& a, std::mt19937_64& rng) {
  const Vec g = gaussian(a.size(), rng);
  return g - a * (a.dot(g) / a.squaredNorm());
}

}  // namespace

TEST(Epi2, CriticalConeShapes) {
  EXPECT_EQ(critical_cone_Q(v3(2, 1, 0), v3(0, 0, 0)).cone.kind(), SetKind::All);
  EXPECT_EQ(critical_cone_Q(v3(0, 0, 0), v3(0, 0, 0)).cone.kind(), SetKind::SOC);
  EXPECT_EQ(critical_cone_Q(v3(1, 1, 0), v3(0, 0, 0)).cone.kind(), SetKind::Halfspace);
  EXPECT_EQ(critical_cone_Q(v3(1, 1, 0), v3(-1, 1, 0)).cone.kind(), SetKind::Hyperplane);
  EXPECT_THROW(critical_cone_Q(v3(1, 1, 0), v3(1, 1, 0)), Error);
}

TEST(Epi2, EpiDerivativeExamples) {
  const ExtendedReal a = epi_second_derivative(v3(2, 1, 0), v3(0, 0, 0), v3(-4, 3, 9));
  EXPECT_TRUE(a.is_finite());
  EXPECT_EQ(a.value, 0.0);
  const ExtendedReal b = epi_second_derivative(v3(1, 1, 0), v3(-1, 1, 0), v3(1, 1, 0));
  EXPECT_TRUE(b.is_finite());
  EXPECT_NEAR(b.value, 0.0, 1e-15);
  EXPECT_TRUE(epi_second_derivative(v3(0, 0, 0), v3(-1, 0, 0), v3(0, 1, 0)).infinite);
  const ExtendedReal c = epi_second_derivative(v3(1, 1, 0), v3(-2, 2, 0), v3(0, 0, 1));
  EXPECT_NEAR(c.value, 2.0 / 1.0, 1e-14);
  EXPECT_THROW(epi_second_derivative(v3(1, 1, 0), v3(1, 0, 0), v3(0, 0, 1)), Error);
}

TEST(Epi2, QuotientExamples) {
  const ExtendedReal a = second_order_quotient(v3(2, 1, 0), v3(0, 0, 0), v3(1, 5, 0), 1e-3);
  EXPECT_TRUE(a.is_finite());
  EXPECT_EQ(a.value, 0.0);
  const Vec y = v3(-2, 1, 0), v = v3(1, 0.5, 0.5);
  const double t = 0.1;
  const ExtendedReal b = second_order_quotient(v3(0, 0, 0), y, v, t);
  EXPECT_NEAR(b.value, -t * y.dot(v) / (t * t / 2), 1e-12);
  EXPECT_GE(b.value, 0.0);
  EXPECT_TRUE(second_order_quotient(v3(1, 1, 0), v3(0, 0, 0), v3(0, 1, 0), 0.1).infinite);
}

TEST(Epi2, Homogeneity) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    const int m = 1 + k % 4;
    const Vec x = boundary_point(m, rng);
    const Vec y = hat(x) * 0.7;
    const Vec v = in_hyperplane(hat(x), rng);
    for (double s : {0.5, 2.0, 10.0})
      EXPECT_NEAR(formula(x, y, s * v), s * s * formula(x, y, v), 1e-12 * s * s * scale_of(v) * scale_of(v));
  }
}

TEST(Epi2, RecoverySequenceConverges) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 20; ++k) {
    const int m = 2 + k % 3;
    Vec x = boundary_point(m, rng);
    x /= x.norm();
    const Vec y = hat(x);
    Vec v = in_hyperplane(hat(x), rng);
    v /= v.norm();
    double prev = 1e300;
    for (double t : {1e-2, 1e-4, 1e-6}) {
      const Vec vt = recovery_sequence(x, y, v, t);
      const Vec xt = x + t * vt;
      EXPECT_LE(std::abs(xt(0) - tail(xt).norm()), 1e-9);
      EXPECT_NEAR((t * vt).norm(), t, 1e-9);
      const double err = (vt - v).norm();
      EXPECT_LT(err, prev);
      prev = err;
      EXPECT_TRUE(second_order_quotient(x, y, vt, t).is_finite());
    }
  }
}

TEST(Epi2, LowerBoundAlongPerturbations) {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 100; ++k) {
    const int m = 1 + k % 4;
    const Vec x = boundary_point(m, rng);
    const Vec y = hat(x) * (0.5 + k % 3);
    const Vec v = in_hyperplane(hat(x), rng);
    const double f = formula(x, y, v);
    for (double t : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const Vec vk = v + std::sqrt(t) * gaussian(m + 1, rng);
      const ExtendedReal q = second_order_quotient(x, y, vk, t);
      // liminf is over sequences; quotients along vk -> v stay above the limit
      if (q.is_finite()) EXPECT_GE(q.value, f - 1e-6 - 10 * std::sqrt(t) * scale_of(v) * y.norm());
    }
  }
}

TEST(Epi2, GraphicalDerivativeNQ) {
  EXPECT_EQ(graphical_derivative_NQ(v3(2, 1, 0), v3(0, 0, 0), v3(1, 1, 1)).kind(), SetKind::Zero);
  EXPECT_TRUE(equal_sets(graphical_derivative_NQ(v3(0, 0, 0), v3(0, 0, 0), v3(2, 1, 0)), ConeSet::zero(3), 3));
  EXPECT_EQ(graphical_derivative_NQ(v3(1, 1, 0), v3(-1, 1, 0), v3(1, 0, 0)).kind(), SetKind::Empty);

  // xbar = (1, (1, 0)), ybar = (-1, (1, 0)), v = (0, (0, 1)): shift (0, 0, 1) plus N_K(v)
  const Vec x = v3(1, 1, 0), y = v3(-1, 1, 0), v = v3(0, 0, 1);
  const ConeSet D = graphical_derivative_NQ(x, y, v);
  EXPECT_TRUE(membership(D, v3(0, 0, 1)));
  EXPECT_TRUE(membership(D, v3(0, 0, 1) + 3 * hat(x)));
  EXPECT_FALSE(membership(D, v3(0, 0, 0)));

  // difference quotients of gph N_Q: points (x + t v_t, y_t) with y_t the
  // outward normal at the moved boundary point approach (v, w)
  const double c = y.norm() / x.norm();
  for (double t : {1e-3, 1e-5}) {
    const Vec vt = recovery_sequence(x, y, v, t);
    const Vec xt = x + t * vt;
    const Vec yt = hat(xt) * (y.norm() / hat(xt).norm());
    const Vec w = (yt - y) / t;
    EXPECT_TRUE(membership(D, w, 1e-2 * std::max(1.0, c))) << t;
  }
}

TEST(Epi2, GraphicalDerivativeIsConeTranslate) {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 30; ++k) {
    const int m = 2 + k % 3;
    const Vec x = boundary_point(m, rng);
    const Vec y = hat(x) * 1.5;
    const Vec v = in_hyperplane(hat(x), rng);
    const ConeSet D = graphical_derivative_NQ(x, y, v);
    const CriticalConeQ K = critical_cone_Q(x, y);
    const ConeSet N = normal_cone_of(K.cone, v);
    const auto w = sample_point(D, rng);
    ASSERT_TRUE(w);
    for (int i = 0; i < 10; ++i) {
      const auto n = sample_point(N, rng);
      ASSERT_TRUE(n);
      EXPECT_TRUE(membership(D, *w + *n));
    }
  }
}

TEST(Epi2, PdcWitness) {
  std::mt19937_64 rng(35);
  for (int m = 2; m <= 5; ++m) {
    for (int k = 0; k < 5; ++k) {
      const Vec x = boundary_point(m, rng);
      const PdcWitness p = pdc_failure_witness(x);
      EXPECT_TRUE(membership(normal_cone_Q(x), p.ybar));
      EXPECT_GT(p.ybar.norm(), 0);
      const CriticalConeQ K = critical_cone_Q(x, p.ybar);
      EXPECT_TRUE(membership(K.cone, p.v));
      EXPECT_TRUE(membership(graphical_derivative_NQ(x, p.ybar, p.v), p.w));
      EXPECT_FALSE(membership(normal_cone_of(K.cone, p.v), p.w));
    }
  }
  EXPECT_THROW(pdc_failure_witness(v3(2, 1, 0)), Error);
  EXPECT_THROW(pdc_failure_witness(v2(1, 1)), Error);
}
