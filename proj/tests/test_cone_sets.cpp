#include "socva/cone_sets.hpp"
#include "socva/golden.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace socva;
using namespace socva::testing;

namespace {

Mat cols2(const Vec& a, const Vec& b) {
  Mat G(a.size(), 2);
  G << a, b;
  return G;
}

// Random leaf of each kind in R^n.
std::vector<std::pair<std::string, std::function<ConeSet(std::mt19937_64&)>>> leaf_makers(int n) {
  return {
      {"zero", [n](std::mt19937_64&) { return ConeSet::zero(n); }},
      {"all", [n](std::mt19937_64&) { return ConeSet::all(n); }},
      {"soc", [n](std::mt19937_64&) { return ConeSet::soc(n); }},
      {"neg_soc", [n](std::mt19937_64&) { return ConeSet::neg_soc(n); }},
      {"halfspace", [n](std::mt19937_64& r) { return ConeSet::halfspace(gaussian(n, r)); }},
      {"hyperplane", [n](std::mt19937_64& r) { return ConeSet::hyperplane(gaussian(n, r)); }},
      {"ray", [n](std::mt19937_64& r) { return ConeSet::ray(gaussian(n, r)); }},
      {"generated", [n](std::mt19937_64& r) { return ConeSet::generated(cols2(gaussian(n, r), gaussian(n, r))); }},
  };
}

}  // namespace

TEST(ConeSets, LeafMembership) {
  EXPECT_TRUE(membership(ConeSet::all(2), v2(3, -7)));
  EXPECT_TRUE(membership(ConeSet::sum(ConeSet::ray(v2(0, -1)), ConeSet::zero(2)), v2(0, -3)));
  EXPECT_FALSE(membership(ConeSet::ray(v2(0, -1)), v2(0, 3)));
  EXPECT_TRUE(membership(ConeSet::soc(3), v3(1, 0.6, 0.8)));
  EXPECT_FALSE(membership(ConeSet::soc(3), v3(1, 0.7, 0.8)));
  EXPECT_TRUE(membership(ConeSet::halfspace(v2(1, 1)), v2(-2, 1)));
  EXPECT_TRUE(membership(ConeSet::hyperplane(v2(1, 0)), v2(0, 5)));
}

TEST(ConeSets, ZeroRayNormalizes) { EXPECT_EQ(ConeSet::ray(v2(0, 0)).kind(), SetKind::Zero); }

TEST(ConeSets, ImageOfSlicedNegativeConeForCase2) {
  const auto phi = reference_phi();
  const Mat J = phi.jacobian(v2(0, 0));
  for (double v1 : {-2.0, 0.5, 1.0}) {
    const Vec v = v2(v1, 0);
    const ConeSet S = ConeSet::linear_image(
        J.transpose(), ConeSet::intersect(ConeSet::neg_soc(3), ConeSet::hyperplane(J * v)));
    // J' (-Q) = {0} x (-inf, 0]
    EXPECT_FALSE(membership(S, v2(0, 5)));
    EXPECT_TRUE(membership(S, v2(0, -5)));
    EXPECT_FALSE(membership(S, v2(1, 0)));
  }
}

TEST(ConeSets, PolarLeaves) {
  EXPECT_EQ(polar(ConeSet::all(3)).kind(), SetKind::Zero);
  EXPECT_EQ(polar(ConeSet::soc(3)).kind(), SetKind::NegSOC);
  const Vec a = hat(v3(kSqrt2, 1, 1));
  const ConeSet p = polar(ConeSet::halfspace(a));
  ASSERT_EQ(p.kind(), SetKind::Ray);
  EXPECT_LE((p.vec() - a).norm(), 1e-15);
  EXPECT_THROW(polar(ConeSet::singleton(v2(1, 1))), Error);
}

TEST(ConeSets, NormalConeExamples) {
  EXPECT_EQ(normal_cone_of(ConeSet::all(2), v2(1, 2)).kind(), SetKind::Zero);
  // R x R_+ as a generated cone
  Mat G(2, 3);
  G << 1, -1, 0, 0, 0, 1;
  const ConeSet half = ConeSet::generated(G);
  for (double v1 : {-1.0, 0.0, 2.0}) {
    Mat want(2, 1);
    want << 0, -1;
    EXPECT_TRUE(equal_sets(normal_cone_of(half, v2(v1, 0)), ConeSet::generated(want), 2));
  }
  EXPECT_TRUE(equal_sets(normal_cone_of(ConeSet::hyperplane(v2(0, 1)), v2(3, 0)),
                         ConeSet::hyperplane(v2(1, 0)), 2));
  EXPECT_THROW(normal_cone_of(half, v2(0, -1)), Error);
}

TEST(ConeSets, EqualSetsExamples) {
  EXPECT_TRUE(equal_sets(ConeSet::zero(2), ConeSet::zero(2), 2));
  const Vec d = v3(1, -2, 0.5);
  EXPECT_TRUE(equal_sets(ConeSet::sum(ConeSet::zero(3), ConeSet::ray(d)), ConeSet::ray(d), 3));
  const Vec a = v3(0.3, 1, -1);
  EXPECT_TRUE(equal_sets(polar(polar(ConeSet::halfspace(a))), ConeSet::halfspace(a), 3));
  EXPECT_FALSE(equal_sets(ConeSet::halfspace(a), ConeSet::hyperplane(a), 3));
}

TEST(ConeSets, Bipolar) {
  std::mt19937_64 rng(21);
  for (auto& [name, make] : leaf_makers(3)) {
    for (int k = 0; k < 100; ++k) {
      const ConeSet S = make(rng);
      const ConeSet pp = polar(polar(S));
      EXPECT_TRUE(structurally_equal(pp, S) || equal_sets(pp, S, 3, 20)) << name;
    }
  }
}

TEST(ConeSets, PolarityPairing) {
  std::mt19937_64 rng(22);
  for (auto& [name, make] : leaf_makers(3)) {
    for (int k = 0; k < 1000; ++k) {
      const ConeSet S = make(rng);
      const auto s = sample_point(S, rng);
      const auto p = sample_point(polar(S), rng);
      ASSERT_TRUE(s && p) << name;
      EXPECT_LE(s->dot(*p), 1e-10 * scale_of(*s) * scale_of(*p)) << name;
    }
  }
}

TEST(ConeSets, SumMonotonicity) {
  std::mt19937_64 rng(23);
  auto makers = leaf_makers(3);
  for (int k = 0; k < 200; ++k) {
    const ConeSet A = makers[k % makers.size()].second(rng);
    const ConeSet B = makers[(k / 8) % makers.size()].second(rng);
    const auto a = sample_point(A, rng);
    ASSERT_TRUE(a);
    EXPECT_TRUE(membership(ConeSet::sum(A, B), *a)) << to_string(A.kind()) << "+" << to_string(B.kind());
    EXPECT_TRUE(membership(ConeSet::sum(B, A), *a)) << to_string(A.kind()) << "+" << to_string(B.kind());
  }
}

TEST(ConeSets, NormalConeMatchesVariationalInequality) {
  std::mt19937_64 rng(24);
  for (auto& [name, make] : leaf_makers(3)) {
    for (int k = 0; k < 5; ++k) {
      const ConeSet S = make(rng);
      const auto v = sample_point(S, rng);
      ASSERT_TRUE(v);
      const ConeSet N = normal_cone_of(S, *v);
      std::vector<Vec> pts;
      for (int i = 0; i < 1000; ++i) pts.push_back(*sample_point(S, rng));
      for (int i = 0; i < 20; ++i) {
        auto w = i % 2 ? sample_point(N, rng) : std::optional<Vec>(gaussian(3, rng));
        ASSERT_TRUE(w);
        if (w->norm() < 1e-6) continue;  // N = {0}
        *w /= w->norm();
        bool vi = true;
        for (const Vec& s : pts) vi = vi && w->dot(s - *v) <= 1e-10 * scale_of(s - *v);
        const bool in = membership(N, *w, 1e-10);
        if (in) EXPECT_TRUE(vi) << name;
        // a sampled violation certifies non-membership
        if (!vi) EXPECT_FALSE(in) << name;
      }
    }
  }
}

TEST(ConeSets, DecomposeSum) {
  const ConeSet A = ConeSet::ray(v3(1, 0, 0)), B = ConeSet::neg_soc(3);
  const ConeSet S = ConeSet::sum(A, B);
  ASSERT_EQ(S.kind(), SetKind::Sum);
  const Vec v = v3(2, 0, 0) + v3(-1, 0.5, 0);
  const auto d = decompose_sum(S, v);
  ASSERT_TRUE(d);
  EXPECT_LE((d->first + d->second - v).norm(), 1e-10);
  EXPECT_TRUE(membership(A, d->first));
  EXPECT_TRUE(membership(B, d->second));
  const ConeSet R = ConeSet::sum(ConeSet::ray(v2(1, 0)), ConeSet::ray(v2(0, -1)));
  EXPECT_TRUE(membership(R, v2(2, -3)));
  EXPECT_FALSE(decompose_sum(R, v2(-1, 0)));
}
