#include "socva/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace socva {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

Mat json_to_mat(const Json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(what + ": expected " + std::to_string(n) + " rows");
  Mat M(n, n);
  for (int r = 0; r < n; ++r) M.row(r) = json_to_vec(j[r], n).transpose();
  return M;
}

std::vector<QuadComponent> parse_components(const Json& arr, int count, int n, const std::string& what,
                                            std::vector<std::string>& warnings) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != count)
    bad(what + ": expected " + std::to_string(count) + " components");
  std::vector<QuadComponent> out;
  for (int i = 0; i < count; ++i) {
    const Json& c = arr[i];
    if (!c.is_object()) bad(what + ": component must be an object");
    QuadComponent q;
    q.c = c.contains("c") ? c.at("c").get<double>() : 0.0;
    q.g = c.contains("g") ? json_to_vec(c.at("g"), n) : Vec(Vec::Zero(n));
    q.H = c.contains("H") ? json_to_mat(c.at("H"), n, what + " H") : Mat(Mat::Zero(n, n));
    const double asym = (q.H - q.H.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
      std::ostringstream os;
      os << what << "[" << i << "].H is not symmetric (max deviation " << asym << "); symmetrized";
      warnings.push_back(os.str());
    }
    out.push_back(std::move(q));
  }
  return out;
}

Json components_to_json(const QuadraticMap& q) {
  Json arr = Json::array();
  for (const auto& c : q.parts()) {
    Json o;
    o["c"] = c.c;
    o["g"] = vec_to_json(c.g);
    o["H"] = mat_to_json(c.H);
    arr.push_back(o);
  }
  return arr;
}

void emit(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(indent * (depth + 1), ' ');
  const std::string pad_end(indent * depth, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        emit(it.value(), indent, depth + 1, out);
      }
      out += nl + pad_end + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : std::string(",") + nl;
        first = false;
        if (!flat) out += pad;
        emit(e, indent, depth + 1, out);
      }
      if (!flat) out += nl + pad_end;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace

Vec json_to_vec(const Json& j, int expected) {
  if (!j.is_array()) bad("expected a numeric array");
  if (expected >= 0 && static_cast<int>(j.size()) != expected)
    bad("expected an array of length " + std::to_string(expected));
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad("expected a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_to_json(const Mat& M) {
  Json a = Json::array();
  for (int r = 0; r < M.rows(); ++r) a.push_back(vec_to_json(M.row(r).transpose()));
  return a;
}

Json cone_to_json(const ConeSet& S) {
  Json o;
  o["kind"] = to_string(S.kind());
  o["dim"] = S.dim();
  switch (S.kind()) {
    case SetKind::Halfspace:
    case SetKind::Hyperplane:
    case SetKind::Ray:
    case SetKind::Singleton:
    case SetKind::Translate: o["vec"] = vec_to_json(S.vec()); break;
    case SetKind::FinitelyGenerated:
    case SetKind::LinearImage:
    case SetKind::Preimage: o["mat"] = mat_to_json(S.mat()); break;
    default: break;
  }
  if (S.num_children() > 0) {
    Json ch = Json::array();
    for (int i = 0; i < S.num_children(); ++i) ch.push_back(cone_to_json(S.child(i)));
    o["children"] = ch;
  }
  return o;
}

ProblemFile parse_problem(const Json& doc) {
  if (!doc.is_object()) bad("problem file must be a JSON object");
  ProblemFile p;
  try {
    p.n = doc.at("n").get<int>();
    p.m = doc.at("m").get<int>();
  } catch (const nlohmann::json::exception&) {
    bad("problem file needs integer fields n and m");
  }
  if (p.n < 1 || p.m < 1) bad("n and m must be positive");
  if (!doc.contains("phi")) bad("problem file needs phi");
  p.phi = QuadraticMap(p.n, parse_components(doc.at("phi"), p.m + 1, p.n, "phi", p.warnings));
  if (doc.contains("f")) p.f = QuadraticMap(p.n, parse_components(doc.at("f"), p.n, p.n, "f", p.warnings));
  if (doc.contains("points")) {
    const Json& pts = doc.at("points");
    if (!pts.is_array()) bad("points must be an array");
    for (const Json& e : pts) {
      NamedPoint np;
      np.name = e.value("name", std::string("point") + std::to_string(p.points.size()));
      if (!e.contains("x")) bad("point " + np.name + " has no x");
      np.x = json_to_vec(e.at("x"), p.n);
      if (e.contains("x_star")) np.x_star = json_to_vec(e.at("x_star"), p.n);
      if (e.contains("p")) np.p = json_to_vec(e.at("p"), p.n);
      p.points.push_back(std::move(np));
    }
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  try {
    return parse_problem(doc);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("bad problem file: ") + e.what());
  }
}

Json problem_to_json(const ProblemFile& p) {
  Json o;
  o["n"] = p.n;
  o["m"] = p.m;
  o["phi"] = components_to_json(p.phi);
  if (p.f) o["f"] = components_to_json(*p.f);
  if (!p.points.empty()) {
    Json pts = Json::array();
    for (const auto& np : p.points) {
      Json e;
      e["name"] = np.name;
      e["x"] = vec_to_json(np.x);
      if (np.x_star) e["x_star"] = vec_to_json(*np.x_star);
      if (np.p) e["p"] = vec_to_json(*np.p);
      pts.push_back(e);
    }
    o["points"] = pts;
  }
  return o;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  return out;
}

}  // namespace socva
