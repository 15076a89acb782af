#pragma once

// Reference instance: Phi on R^2 into the 3-d Lorentz cone with
// Gamma = {x : x2 >= 0}, and the variational system with f(x) = (x1, x2^2).

#include "socva/constraint_system.hpp"

#include <string>
#include <vector>

namespace socva {

// Phi(x) = (sqrt2 x1^2 + x2, x1^2 + x2/sqrt2, x1^2 - x2/sqrt2)
QuadraticMap reference_phi();
// f(x) = (x1, x2^2)
QuadraticMap reference_f();

struct ReferenceCase {
  std::string name;
  Vec x;
  Vec x_star;  // for calmness cases this holds p
};

std::vector<ReferenceCase> constraint_cases();
std::vector<ReferenceCase> calmness_cases();

// Known tangent cone of gph N_Gamma for constraint case i (0-based).
bool expected_tangent(int i, const Vec& v, const Vec& v_star);

// Coordinates of the 10^4-point probe grid in R^2 x R^2.
const std::vector<double>& probe_values();

struct GoldenRow {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<GoldenRow> run_golden_suite(const QuadraticMap& phi, const QuadraticMap& f);

}  // namespace socva
