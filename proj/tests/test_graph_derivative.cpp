#include "socva/golden.hpp"
#include "socva/graph_derivative.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace socva;
using namespace socva::testing;

namespace {

StationaryPair pair_of(int i) {
  const auto c = constraint_cases()[i];
  return {c.x, c.x_star};
}

Vec v4(const Vec& a, const Vec& b) { return vcat(a, b); }

}  // namespace

TEST(GraphDerivative, GoldenFullSets) {
  const auto phi = reference_phi();
  for (double v1 : {-1.0, 0.5, 2.0}) {
    const auto c2 = graphical_derivative(phi, pair_of(1), v2(v1, 0));
    EXPECT_TRUE(c2.critical);
    EXPECT_TRUE(equal_sets(c2.full_set, ConeSet::hyperplane(v2(1, 0)), 2)) << v1;

    const auto c4 = graphical_derivative(phi, pair_of(3), v2(v1, 0));
    ASSERT_EQ(c4.affine_part.kind(), SetKind::Singleton);
    EXPECT_LE((c4.affine_part.vec() - v2(0, -2 * v1)).norm(), 1e-10);
    EXPECT_TRUE(equal_sets(c4.full_set, ConeSet::hyperplane(v2(1, 0)), 2)) << v1;
  }
  for (double a : {-1.0, 0.0, 3.0})
    for (double b : {-2.0, 0.0, 0.5})
      EXPECT_TRUE(equal_sets(graphical_derivative(phi, pair_of(4), v2(a, b)).full_set, ConeSet::zero(2), 2));
  const auto nc = graphical_derivative(phi, pair_of(1), v2(0, 1));
  EXPECT_FALSE(nc.critical);
  EXPECT_EQ(nc.full_set.kind(), SetKind::Empty);
}

TEST(GraphDerivative, ZeroStarClosedForm) {
  const auto phi = reference_phi();
  EXPECT_TRUE(equal_sets(graphical_derivative_zero_star(phi, v2(0, 0), v2(0.3, 1)), ConeSet::zero(2), 2));
  EXPECT_TRUE(equal_sets(graphical_derivative_zero_star(phi, v2(0, 0), v2(0.3, 0)), ConeSet::ray(v2(0, -1)), 2));
  EXPECT_TRUE(equal_sets(graphical_derivative_zero_star(phi, v2(0.2, 1), v2(1, -1)), ConeSet::zero(2), 2));
}

TEST(GraphDerivative, ZeroStarConsistency) {
  const auto phi = reference_phi();
  for (int i : {0, 2, 4}) {
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {0.0, 1.0}) {
        const Vec v = v2(a, b);
        const auto r = graphical_derivative(phi, pair_of(i), v);
        EXPECT_TRUE(equal_sets(r.full_set, graphical_derivative_zero_star(phi, pair_of(i).x, v), 2))
            << i << " " << a << " " << b;
      }
  }
}

TEST(GraphDerivative, StratifiedDescription) {
  const auto phi = reference_phi();
  const TangentGraph interior(phi, {v2(0.2, 1), v2(0, 0)});
  EXPECT_TRUE(interior.contains(v2(3, -1), v2(0, 0)));
  EXPECT_FALSE(interior.contains(v2(3, -1), v2(0, 1e-3)));

  const TangentGraph c1(phi, pair_of(0));
  ASSERT_TRUE(c1.strata().has_value());
  EXPECT_TRUE(c1.contains(v2(-2, 1), v2(0, 0)));
  EXPECT_TRUE(c1.contains(v2(-2, 0), v2(0, -4)));
  EXPECT_FALSE(c1.contains(v2(-2, 0), v2(0, 4)));
  EXPECT_FALSE(c1.contains(v2(-2, 1), v2(0, -4)));

  const TangentGraph c2(phi, pair_of(1));
  EXPECT_TRUE(c2.contains(v2(5, 0), v2(0, 7)));
  EXPECT_TRUE(c2.contains(v2(5, 0), v2(0, -7)));
  EXPECT_FALSE(c2.contains(v2(5, 0.1), v2(0, 7)));
}

TEST(GraphDerivative, ConeProperty) {
  const auto phi = reference_phi();
  const auto& vals = probe_values();
  for (int i = 0; i < 5; ++i) {
    const TangentGraph tg(phi, pair_of(i));
    for (double a : vals)
      for (double b : {0.0, 0.5})
        for (double c : {0.0, -1.0})
          for (double d : {-1.0, 0.0, 2.0}) {
            const Vec v = v2(a, b), vs = v2(c, d);
            if (!tg.contains(v, vs)) continue;
            for (double s : {0.5, 2.0, 10.0}) EXPECT_TRUE(tg.contains(s * v, s * vs)) << i;
          }
  }
}

TEST(GraphDerivative, AffinePartInFullSet) {
  const auto phi = reference_phi();
  for (int i = 0; i < 5; ++i) {
    for (double a : {-1.0, 1.0})
      for (double b : {0.0, 1.0}) {
        const auto r = graphical_derivative(phi, pair_of(i), v2(a, b));
        if (!r.critical) continue;
        for (const Vec& l : r.lambdas) {
          const Vec w = second_order_operator(phi, pair_of(i).x, l) * v2(a, b);
          EXPECT_TRUE(membership(r.full_set, w)) << i;
          const auto parts = explain_member(r, w);
          ASSERT_TRUE(parts) << i;
          EXPECT_LE((parts->first + parts->second - w).norm(), 1e-9);
        }
      }
  }
}

TEST(GraphDerivative, MultiplierBall) {
  const auto phi = reference_phi();
  const double kappa = kSqrt2;
  for (int i : {1, 3}) {
    for (double v1 : {-1.0, 0.0, 2.0}) {
      const auto r = graphical_derivative(phi, pair_of(i), v2(v1, 0), kappa);
      for (const Vec& l : r.lambdas) EXPECT_LE(l.norm(), kappa * pair_of(i).x_star.norm() + 1e-9);
    }
  }
}

TEST(GraphDerivative, SampledTangentsPass) {
  const auto phi = reference_phi();
  const GraphProjector proj = halfspace_graph_projector(v2(0, 1));
  for (int i = 0; i < 5; ++i) {
    const TangentGraph tg(phi, pair_of(i));
    const auto samples = sample_tangent_oracle(proj, pair_of(i), 100, 1e-4);
    ASSERT_EQ(samples.size(), 100u);
    EXPECT_LE(samples[0].v.norm() + samples[0].v_star.norm(), 0.0);
    for (const auto& s : samples) {
      EXPECT_LE(s.t, 1e-4);
      EXPECT_TRUE(tg.contains(s.v, s.v_star, 1e-5)) << i;
    }
  }
  // case 4 quotients lie in {(v1, 0, 0, v2*)}
  for (const auto& s : sample_tangent_oracle(proj, pair_of(3), 50, 1e-4)) {
    EXPECT_LE(std::abs(s.v(1)), 1e-12);
    EXPECT_LE(std::abs(s.v_star(0)), 1e-12);
  }
}

TEST(GraphDerivative, ProjectorOntoGraph) {
  const GraphProjector proj = halfspace_graph_projector(v2(0, 1));
  EXPECT_LE((proj(v2(1, 2), v2(0.5, 0.5)) - v4(v2(1, 2), v2(0, 0))).norm(), 1e-15);
  EXPECT_LE((proj(v2(1, -2), v2(0, 0)) - v4(v2(1, 0), v2(0, 0))).norm(), 1e-15);
  EXPECT_LE((proj(v2(1, 0.1), v2(0, -3)) - v4(v2(1, 0), v2(0, -3))).norm(), 1e-15);
}
