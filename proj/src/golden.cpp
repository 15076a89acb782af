#include "socva/golden.hpp"

#include "socva/conic_lp.hpp"
#include "socva/graph_derivative.hpp"
#include "socva/stability.hpp"

#include <cmath>
#include <sstream>

namespace socva {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

QuadComponent quad(double h11, double h22, double g1, double g2) {
  QuadComponent q;
  q.g = v2(g1, g2);
  q.H = Mat::Zero(2, 2);
  q.H(0, 0) = h11;
  q.H(1, 1) = h22;
  return q;
}

double cos_dist(const Vec& a, const Vec& b) { return 1.0 - a.dot(b) / (a.norm() * b.norm()); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

}  // namespace

QuadraticMap reference_phi() {
  return QuadraticMap(2, {quad(2 * kSqrt2, 0, 0, 1), quad(2, 0, 0, 1 / kSqrt2), quad(2, 0, 0, -1 / kSqrt2)});
}

QuadraticMap reference_f() { return QuadraticMap(2, {quad(0, 0, 1, 0), quad(0, 2, 0, 0)}); }

std::vector<ReferenceCase> constraint_cases() {
  return {{"case1", v2(0, 0), v2(0, 0)},
          {"case2", v2(0, 0), v2(0, -1)},
          {"case3", v2(1, 0), v2(0, 0)},
          {"case4", v2(1, 0), v2(0, -1)},
          {"case5", v2(0, 1), v2(0, 0)}};
}

std::vector<ReferenceCase> calmness_cases() {
  return {{"case1", v2(0, 0), v2(0, 0)},
          {"case2", v2(0, 0), v2(0, -1)},
          {"case3", v2(1, 0), v2(1, 0)},
          {"case4", v2(1, 0), v2(1, -1)},
          {"case5", v2(0, 1), v2(0, 1)}};
}

bool expected_tangent(int i, const Vec& v, const Vec& vs) {
  switch (i) {
    case 0:
    case 2:
      return (v(1) > 0 && vs(0) == 0 && vs(1) == 0) || (v(1) == 0 && vs(0) == 0 && vs(1) <= 0);
    case 1:
    case 3: return v(1) == 0 && vs(0) == 0;
    case 4: return vs(0) == 0 && vs(1) == 0;
  }
  return false;
}

const std::vector<double>& probe_values() {
  static const std::vector<double> vals = {-2.0, -1.0, -0.5, -0.25, 0.0, 0.125, 0.25, 0.5, 1.0, 3.0};
  return vals;
}

std::vector<GoldenRow> run_golden_suite(const QuadraticMap& phi, const QuadraticMap& f) {
  std::vector<GoldenRow> rows;
  auto row = [&](std::string id, auto&& body) {
    GoldenRow r;
    r.id = std::move(id);
    try {
      r.pass = body(r.detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    rows.push_back(std::move(r));
  };
  const auto cases = constraint_cases();
  auto pair_of = [&](int i) { return StationaryPair{cases[i].x, cases[i].x_star}; };

  row("multipliers/case1 ray", [&](std::string& d) {
    const MultiplierSet ms = multiplier_set(phi, pair_of(0));
    const double cd = ms.kind == MultiplierKind::Ray ? cos_dist(ms.point, v3(-kSqrt2, 1, -1)) : 1.0;
    d = std::string(to_string(ms.kind)) + ", cosine distance " + num(cd);
    return ms.kind == MultiplierKind::Ray && cd <= 1e-10;
  });
  row("multipliers/case2 slater body", [&](std::string& d) {
    const MultiplierSet ms = multiplier_set(phi, pair_of(1));
    d = std::string(to_string(ms.kind)) + " " + ms.lms;
    return ms.kind == MultiplierKind::SlaterBody;
  });
  row("multipliers/case3 zero", [&](std::string& d) {
    const MultiplierSet ms = multiplier_set(phi, pair_of(2));
    d = to_string(ms.kind);
    return ms.kind == MultiplierKind::Singleton && ms.point.norm() <= 1e-12;
  });
  row("multipliers/case4 singleton", [&](std::string& d) {
    const MultiplierSet ms = multiplier_set(phi, pair_of(3));
    const double err = ms.kind == MultiplierKind::Singleton
                           ? (ms.point - v3(-1, 1 / kSqrt2, 1 / kSqrt2)).norm()
                           : 1.0;
    d = std::string(to_string(ms.kind)) + ", error " + num(err);
    return ms.kind == MultiplierKind::Singleton && err <= 1e-10;
  });
  row("multipliers/case5 ray", [&](std::string& d) {
    const MultiplierSet ms = multiplier_set(phi, pair_of(4));
    const double cd =
        ms.kind == MultiplierKind::Ray ? cos_dist(ms.point, Vec(-v3(kSqrt2, -1, 1))) : 1.0;
    d = std::string(to_string(ms.kind)) + ", cosine distance " + num(cd);
    return ms.kind == MultiplierKind::Ray && cd <= 1e-10;
  });
  row("lp/case2 v=(1,0) argmin", [&](std::string& d) {
    const LpOutcome o = solve_multiplier_lp(phi, pair_of(1), v2(1, 0));
    const double err = o.kind == ArgminKind::Singleton ? (o.point - v3(-1, 1 / kSqrt2, 1 / kSqrt2)).norm() : 1.0;
    d = std::string(to_string(o.kind)) + ", error " + num(err);
    return o.status == LpStatus::Optimal && o.kind == ArgminKind::Singleton && err <= 1e-10;
  });
  row("lp/case2 v=0 whole multiplier set", [&](std::string& d) {
    const LpOutcome o = solve_multiplier_lp(phi, pair_of(1), v2(0, 0));
    Mat row(1, 3);
    row << kSqrt2, 1, -1;
    const ConeSet want = ConeSet::intersect(ConeSet::neg_soc(3),
                                            ConeSet::affine_solutions(row, Vec::Constant(1, -kSqrt2)));
    const bool eq = equal_sets(o.argmin, want, 3);
    d = std::string(to_string(o.kind)) + (eq ? ", equal" : ", differs");
    return o.kind == ArgminKind::WholeSet && eq;
  });
  row("gder/case2 v=(1,0)", [&](std::string& d) {
    const auto r = graphical_derivative(phi, pair_of(1), v2(1, 0));
    const bool ok = equal_sets(r.full_set, ConeSet::hyperplane(v2(1, 0)), 2);
    d = ok ? "{0} x R" : "differs";
    return ok;
  });
  row("gder/case4 v=(1,0)", [&](std::string& d) {
    const double v1 = 1.5;
    const auto r = graphical_derivative(phi, pair_of(3), v2(v1, 0));
    const bool aff = r.affine_part.kind() == SetKind::Singleton &&
                     (r.affine_part.vec() - v2(0, -2 * v1)).norm() <= 1e-10;
    const bool ok = aff && equal_sets(r.full_set, ConeSet::hyperplane(v2(1, 0)), 2);
    d = aff ? "affine (0, -2 v1)" : "affine part differs";
    return ok;
  });
  row("gder/case5 all v", [&](std::string& d) {
    int bad = 0;
    for (double a : probe_values())
      for (double b : probe_values()) {
        const auto r = graphical_derivative(phi, pair_of(4), v2(a, b));
        if (!equal_sets(r.full_set, ConeSet::zero(2), 2, 20)) ++bad;
      }
    d = std::to_string(bad) + " directions differ from {0}";
    return bad == 0;
  });
  const auto& vals = probe_values();
  for (int i = 0; i < 5; ++i) {
    row("tangent/" + cases[i].name + " probe grid", [&, i](std::string& d) {
      const TangentGraph tg(phi, pair_of(i));
      int disagree = 0, total = 0;
      for (double a : vals)
        for (double b : vals)
          for (double c : vals)
            for (double e : vals) {
              const Vec v = v2(a, b), vs = v2(c, e);
              ++total;
              if (tg.contains(v, vs) != expected_tangent(i, v, vs)) ++disagree;
            }
      d = std::to_string(disagree) + " of " + std::to_string(total) + " disagree";
      return disagree == 0;
    });
  }
  row("cq/rcq fails at (0,1)", [&](std::string& d) {
    const bool rcq = check_rcq(phi, v2(0, 1));
    d = rcq ? "RCQ holds" : "RCQ fails";
    return !rcq;
  });
  const Verdict want[] = {Verdict::NotCalm, Verdict::Calm, Verdict::NotCalm, Verdict::Calm, Verdict::Calm};
  const auto calm = calmness_cases();
  for (int i = 0; i < 5; ++i) {
    row("calmness/" + calm[i].name, [&, i](std::string& d) {
      const VariationalSystem sys{&f, &phi, calm[i].x_star, calm[i].x};
      const CalmnessVerdict cv = check_isolated_calmness(sys, kSqrt2, "reference estimate");
      d = to_string(cv.verdict);
      return cv.verdict == want[i];
    });
  }
  return rows;
}

}  // namespace socva
