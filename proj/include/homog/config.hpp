#pragma once
/// @file config.hpp
/// @brief JSON run configuration: schema validation (unknown keys rejected,
///        ranges checked), named right-hand sides, and construction of the
///        coefficient family described by the config.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homog/coeffs.hpp"
#include "homog/solver.hpp"

namespace homog {

struct GridConfig {
  int n = 64;          ///< macro cells per side
  int m = 64;          ///< unit-cell cells per side
  int quadrature = 2;  ///< Gauss points per direction (2 or 3)
};

struct SolverConfig {
  SolveMethod method = SolveMethod::automatic;
  double tolerance = 1e-10;
  int max_iterations = 4000;
};

struct ProblemConfig {
  double lambda = -1.0;  ///< resolvent shift; negative means "auto" (index + 1)
  bool lambda_auto = true;
  double mu_offset = 3.0;  ///< second shift for resolvent-family checks: mu = lambda + offset
  std::string rhs = "sinpi";
  std::string rhs_perturbation;  ///< empty = none; else f_delta = f + delta * g
  std::vector<double> deltas = {0.25, 0.125, 0.0625};
};

struct OutputConfig {
  bool csv = true;
  bool plot = false;
};

struct EngineConfig {
  std::string preset_name = "layered";
  nlohmann::json preset_params = nlohmann::json::object();
  GridConfig grid;
  SolverConfig solver;
  ProblemConfig problem;
  std::string beta0_mode = "auto";  ///< auto | analytic | empirical
  int basket = 200;
  OutputConfig output;
  std::uint64_t seed = 1;

  static EngineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  TwoScaleCoefficient make_coefficient() const;
  SolverOptions solver_options() const;
  std::function<double(Vec2)> rhs_function() const;
  std::function<double(Vec2)> rhs_perturbation_function() const;
};

/// Parse + validate a config file; config_error with the key path on schema
/// violations, file errors, or out-of-range values.
EngineConfig load_config_file(const std::string& path);

/// Named right-hand sides: sinpi, eigen, one, poly (and perturbations cospi,
/// sinpi2, one). Throws config_error for unknown names.
std::function<double(Vec2)> named_rhs(const std::string& name);

}  // namespace homog
