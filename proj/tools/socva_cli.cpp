// socva: analysis of constraint systems Phi(x) in Q (Lorentz cone).

#include "socva/conic_lp.hpp"
#include "socva/golden.hpp"
#include "socva/graph_derivative.hpp"
#include "socva/problem_io.hpp"
#include "socva/stability.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

using namespace socva;

namespace {

struct Options {
  std::string file;
  std::string point;
  std::string x, x_star, p, v, v_star;
  double tol = kMembershipTol;
  bool json = false;
  bool strict = false;
  double kappa = 0.0;  // 0: not given
  double radius = 0.5;
  int grid = 11;
};

bool g_negative = false;  // set by commands with a negative verdict

Vec parse_vec(const std::string& s, int n, const char* what) {
  Vec out(n);
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= n) throw Error(ErrorCode::InvalidInput, std::string(what) + ": too many entries");
    try {
      size_t used = 0;
      out(i) = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, std::string(what) + ": not a number: " + item);
    }
    ++i;
  }
  if (i != n) throw Error(ErrorCode::InvalidInput, std::string(what) + ": expected " + std::to_string(n) + " entries");
  return out;
}

class Session {
 public:
  explicit Session(const Options& o) : o_(o) {
    if (o_.file.empty()) throw Error(ErrorCode::InvalidInput, "--file is required");
    prob_ = load_problem(o_.file);
    for (const auto& w : prob_.warnings) std::cerr << "warning: " << w << "\n";
    if (!o_.point.empty()) {
      for (const auto& np : prob_.points)
        if (np.name == o_.point) named_ = &np;
      if (!named_) throw Error(ErrorCode::InvalidInput, "no point named " + o_.point);
    }
  }

  const QuadraticMap& phi() const { return prob_.phi; }
  int n() const { return prob_.n; }

  Vec x() const {
    if (!o_.x.empty()) return parse_vec(o_.x, n(), "--x");
    if (named_) return named_->x;
    throw Error(ErrorCode::InvalidInput, "a point is required (--x or --point)");
  }
  Vec x_star() const {
    if (!o_.x_star.empty()) return parse_vec(o_.x_star, n(), "--x-star");
    if (named_ && named_->x_star) return *named_->x_star;
    if (named_ && named_->p && prob_.f) return *named_->p - prob_.f->value(named_->x);
    throw Error(ErrorCode::InvalidInput, "x* is required (--x-star or a point with x_star)");
  }
  Vec p() const {
    if (!o_.p.empty()) return parse_vec(o_.p, n(), "--p");
    if (named_ && named_->p) return *named_->p;
    throw Error(ErrorCode::InvalidInput, "p is required (--p or a point with p)");
  }
  Vec v() const {
    if (o_.v.empty()) throw Error(ErrorCode::InvalidInput, "--v is required");
    return parse_vec(o_.v, n(), "--v");
  }
  bool has_x_star() const {
    return !o_.x_star.empty() || (named_ && (named_->x_star || (named_->p && prob_.f)));
  }
  StationaryPair pair() const { return {x(), x_star()}; }
  const QuadraticMap& f() const {
    if (!prob_.f) throw Error(ErrorCode::InvalidInput, "problem file has no f");
    return *prob_.f;
  }

 private:
  const Options& o_;
  ProblemFile prob_;
  const NamedPoint* named_ = nullptr;
};

Vec feasible_value(const SmoothMapOracle& phi, const Vec& x) {
  const Vec F = phi.value(x);
  if (classify(F) == PointClass::Outside) throw Error(ErrorCode::NotFeasible, "Phi(x) is outside Q");
  return F;
}

Json multipliers_json(const MultiplierSet& ms) {
  Json o;
  o["kind"] = to_string(ms.kind);
  if (!ms.lms.empty()) o["alternative"] = ms.lms;
  if (ms.point.size()) o["point"] = vec_to_json(ms.point);
  if (ms.relint.size()) o["relint"] = vec_to_json(ms.relint);
  o["set"] = cone_to_json(ms.set);
  return o;
}

Json lp_json(const LpOutcome& lp) {
  Json o;
  o["status"] = to_string(lp.status);
  if (lp.status == LpStatus::Optimal) {
    o["value"] = lp.value;
    o["attained"] = lp.attained;
    o["argmin_kind"] = to_string(lp.kind);
    if (lp.point.size()) o["point"] = vec_to_json(lp.point);
  }
  return o;
}

Json gder_json(const GraphDerivativeResult& r) {
  Json o;
  o["v"] = vec_to_json(r.v);
  o["critical"] = r.critical;
  o["mscq"] = "asserted, not verified";
  if (r.critical) {
    o["multiplier_program"] = lp_json(r.argmin_multipliers);
    Json ls = Json::array();
    for (const auto& l : r.lambdas) ls.push_back(vec_to_json(l));
    o["lambdas"] = ls;
    o["affine_part"] = cone_to_json(r.affine_part);
    o["normal_part"] = cone_to_json(r.normal_part);
  }
  o["full_set"] = cone_to_json(r.full_set);
  if (!r.note.empty()) o["note"] = r.note;
  return o;
}

Json cmd_classify(const Options& o) {
  Session s(o);
  const Vec x = s.x();
  const Vec F = feasible_value(s.phi(), x);
  Json out;
  out["x"] = vec_to_json(x);
  out["phi"] = vec_to_json(F);
  out["class"] = to_string(classify(F, o.tol));
  out["tangent_cone"] = cone_to_json(tangent_cone_Gamma(s.phi(), x));
  out["normal_cone"] = cone_to_json(normal_cone_Gamma(s.phi(), x));
  return out;
}

Json cmd_multipliers(const Options& o) {
  Session s(o);
  const StationaryPair pr = s.pair();
  feasible_value(s.phi(), pr.x);
  const MultiplierSet ms = multiplier_set(s.phi(), pr);
  if (ms.kind == MultiplierKind::Empty) throw Error(ErrorCode::InvalidPair, "x* is not in N_Gamma(x)");
  return multipliers_json(ms);
}

Json cmd_critical_cone(const Options& o) {
  Session s(o);
  const StationaryPair pr = s.pair();
  feasible_value(s.phi(), pr.x);
  Json out;
  out["critical_cone"] = cone_to_json(critical_cone(s.phi(), pr));
  if (const auto faces = polyhedral_faces(critical_cone(s.phi(), pr))) {
    Json fs = Json::array();
    for (const auto& f : *faces) fs.push_back(f.label);
    out["faces"] = fs;
  }
  return out;
}

Json cmd_gder(const Options& o) {
  Session s(o);
  const StationaryPair pr = s.pair();
  feasible_value(s.phi(), pr.x);
  std::optional<double> kappa;
  if (o.kappa > 0) kappa = o.kappa;
  Json out = gder_json(graphical_derivative(s.phi(), pr, s.v(), kappa));
  if (s.pair().x_star.norm() <= 1e-12)
    out["closed_form_zero_star"] = cone_to_json(graphical_derivative_zero_star(s.phi(), pr.x, s.v()));
  return out;
}

Json cmd_tangent_graph(const Options& o) {
  Session s(o);
  const StationaryPair pr = s.pair();
  feasible_value(s.phi(), pr.x);
  std::optional<double> kappa;
  if (o.kappa > 0) kappa = o.kappa;
  const TangentGraph tg(s.phi(), pr, kappa);
  Json out;
  out["critical_cone"] = cone_to_json(tg.critical());
  out["mscq"] = "asserted, not verified";
  if (tg.strata()) {
    Json st = Json::array();
    for (const auto& f : *tg.strata()) {
      Json e;
      e["face"] = f.label;
      e["face_closure"] = cone_to_json(f.face_closure);
      e["normal"] = cone_to_json(f.normal);
      e["affine"] = mat_to_json(f.affine);
      e["exact"] = f.exact;
      st.push_back(e);
    }
    out["strata"] = st;
  } else {
    out["strata"] = "not polyhedral; membership only";
  }
  if (!o.v.empty() && !o.v_star.empty()) {
    const bool in = tg.contains(s.v(), parse_vec(o.v_star, s.n(), "--v-star"), o.tol);
    out["member"] = in;
    if (!in) g_negative = true;
  }
  return out;
}

Json cmd_check_cq(const Options& o) {
  Session s(o);
  const Vec x = s.x();
  feasible_value(s.phi(), x);
  Json out;
  const bool rcq = check_rcq(s.phi(), x);
  out["rcq"] = rcq;
  bool all = rcq;
  if (s.has_x_star()) {
    const StationaryPair pr = s.pair();
    const MultiplierSet ms = validate_pair(s.phi(), pr);
    out["multiplier"] = vec_to_json(ms.relint);
    const bool dual = check_dual_cq(s.phi(), pr, ms.relint);
    const bool srcq = check_srcq(s.phi(), pr, ms.relint);
    out["dual_cq"] = dual;
    out["srcq"] = srcq;
    all = all && dual && srcq;
  }
  if (!all) g_negative = true;
  return out;
}

Json cmd_probe_mscq(const Options& o) {
  Session s(o);
  const Vec x = s.x();
  feasible_value(s.phi(), x);
  const MscqReport rep = probe_mscq(s.phi(), x, o.radius, o.grid);
  Json out;
  out["kappa_hat"] = rep.kappa_hat;
  out["evaluated"] = rep.evaluated;
  out["skipped"] = rep.skipped;
  out["radius"] = o.radius;
  out["grid"] = o.grid;
  out["note"] = "falsification probe, not a proof";
  return out;
}

Json cmd_calmness(const Options& o) {
  Session s(o);
  const VariationalSystem sys{&s.f(), &s.phi(), s.p(), s.x()};
  feasible_value(s.phi(), sys.x_bar);
  double kappa = o.kappa;
  std::string source = "user";
  if (!(kappa > 0)) {
    kappa = probe_mscq(s.phi(), sys.x_bar, o.radius, o.grid).kappa_hat;
    source = "probe";
    if (!(kappa > 0)) kappa = 1.0, source = "probe (no violations sampled; 1 used)";
  }
  const CalmnessVerdict cv = check_isolated_calmness(sys, kappa, source);
  Json out;
  out["verdict"] = to_string(cv.verdict);
  out["kappa"] = cv.kappa;
  out["kappa_source"] = cv.kappa_source;
  out["mscq"] = "asserted, not verified";
  if (cv.witness) {
    out["witness"] = vec_to_json(*cv.witness);
    out["lambda"] = vec_to_json(cv.lambda);
    out["normal"] = vec_to_json(cv.normal);
    out["residual"] = cv.residual;
  }
  Json rep = Json::array();
  for (const auto& l : cv.report) rep.push_back(l);
  out["strata"] = rep;
  if (cv.verdict == Verdict::NotCalm) g_negative = true;
  return out;
}

void print_text(const Json& j, const std::string& prefix = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_object()) {
      std::cout << prefix << it.key() << ":\n";
      print_text(*it, prefix + "  ");
    } else {
      std::cout << prefix << it.key() << ": " << dump_json(*it, 0) << "\n";
    }
  }
}

int run_golden(const Options& o) {
  QuadraticMap phi = reference_phi();
  QuadraticMap f = reference_f();
  if (!o.file.empty()) {
    ProblemFile p = load_problem(o.file);
    if (p.n != 2 || p.m != 2) throw Error(ErrorCode::InvalidInput, "reference suite needs n = 2, m = 2");
    phi = p.phi;
    if (p.f) f = *p.f;
  }
  const auto rows = run_golden_suite(phi, f);
  int failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  if (o.json) {
    Json out;
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json e;
      e["id"] = r.id;
      e["result"] = r.pass ? "PASS" : "FAIL";
      e["detail"] = r.detail;
      arr.push_back(e);
    }
    out["rows"] = arr;
    out["passed"] = static_cast<int>(rows.size()) - failed;
    out["failed"] = failed;
    std::cout << dump_json(out) << "\n";
  } else {
    for (const auto& r : rows) std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.id << "  (" << r.detail << ")\n";
    std::cout << rows.size() - failed << "/" << rows.size() << " passed\n";
  }
  return failed == 0 ? 0 : 1;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput:
    case ErrorCode::DirectionNotCritical: return 2;
    case ErrorCode::NotFeasible:
    case ErrorCode::OutsideCone:
    case ErrorCode::InvalidPair:
    case ErrorCode::InvalidNormal: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socva: second-order variational analysis of Lorentz-cone constraint systems"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "membership tolerance")->capture_default_str();
  app.add_flag("--json", o.json, "machine-readable output");
  app.add_flag("--strict", o.strict, "exit 1 on a negative verdict");
  app.add_option("--kappa", o.kappa, "asserted MSCQ modulus");

  auto with_point = [&](CLI::App* c) {
    c->add_option("--file", o.file, "problem file (JSON)")->required();
    c->add_option("--point", o.point, "named point from the file");
    c->add_option("--x", o.x, "point, comma separated (use --x=-1,0 for negatives)");
    return c;
  };
  auto with_pair = [&](CLI::App* c) {
    with_point(c);
    c->add_option("--x-star", o.x_star, "normal vector x*");
    return c;
  };
  std::string which;
  auto sub = [&](const char* name, const char* desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->callback([&which, name] { which = name; });
    return c;
  };
  with_point(sub("classify", "Phi(x), its class, tangent and normal cones of Gamma"));
  with_pair(sub("multipliers", "Lagrange multiplier set"));
  with_pair(sub("critical-cone", "critical cone K(x, x*)"));
  with_pair(sub("gder", "graphical derivative DN_Gamma(x, x*)(v)"))->add_option("--v", o.v)->required();
  {
    CLI::App* c = with_pair(sub("tangent-graph", "tangent cone to gph N_Gamma"));
    c->add_option("--v", o.v, "test direction");
    c->add_option("--v-star", o.v_star, "test image");
  }
  with_pair(sub("check-cq", "RCQ, dual CQ and SRCQ"));
  {
    CLI::App* c = with_point(sub("probe-mscq", "sampled MSCQ modulus"));
    c->add_option("--radius", o.radius)->capture_default_str();
    c->add_option("--grid", o.grid)->capture_default_str();
  }
  {
    CLI::App* c = with_point(sub("calmness", "isolated calmness of p in f(x) + N_Gamma(x)"));
    c->add_option("--p", o.p, "parameter p");
    c->add_option("--radius", o.radius, "probe radius when --kappa is absent")->capture_default_str();
    c->add_option("--grid", o.grid, "probe grid when --kappa is absent")->capture_default_str();
  }
  sub("reproduce-paper", "run the reference suite and print a PASS/FAIL table")
      ->add_option("--file", o.file, "replace the reference Phi (and f) by this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (which == "reproduce-paper") return run_golden(o);
    Json out;
    if (which == "classify") out = cmd_classify(o);
    else if (which == "multipliers") out = cmd_multipliers(o);
    else if (which == "critical-cone") out = cmd_critical_cone(o);
    else if (which == "gder") out = cmd_gder(o);
    else if (which == "tangent-graph") out = cmd_tangent_graph(o);
    else if (which == "check-cq") out = cmd_check_cq(o);
    else if (which == "probe-mscq") out = cmd_probe_mscq(o);
    else if (which == "calmness") out = cmd_calmness(o);
    if (o.json) std::cout << dump_json(out) << "\n";
    else print_text(out);
    return o.strict && g_negative ? 1 : 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
