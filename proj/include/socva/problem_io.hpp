#pragma once

// JSON problem files and JSON rendering of results.

#include "socva/cone_sets.hpp"
#include "socva/constraint_system.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace socva {

using Json = nlohmann::ordered_json;

struct NamedPoint {
  std::string name;
  Vec x;
  std::optional<Vec> x_star;
  std::optional<Vec> p;
};

struct ProblemFile {
  int n = 0;
  int m = 0;
  QuadraticMap phi;
  std::optional<QuadraticMap> f;
  std::vector<NamedPoint> points;
  std::vector<std::string> warnings;  // e.g. asymmetric H symmetrized
};

// Throws Error(InvalidInput) on malformed documents.
ProblemFile parse_problem(const Json& doc);
ProblemFile load_problem(const std::string& path);
Json problem_to_json(const ProblemFile& p);

Vec json_to_vec(const Json& j, int expected = -1);
Json vec_to_json(const Vec& v);
Json mat_to_json(const Mat& M);
Json cone_to_json(const ConeSet& S);

// Serializer writing every number with 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace socva
