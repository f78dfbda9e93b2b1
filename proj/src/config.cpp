#include "homog/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "homog/common.hpp"

namespace homog {

namespace {

constexpr double PI = 3.14159265358979323846;

using nlohmann::json;

/// Section reader mirroring the coefficient ParamReader: typed access, unknown
/// keys rejected (with the section path in the message), ranges checked by the
/// caller.
class SectionReader {
 public:
  SectionReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw config_error(path_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw config_error(path_ + "." + key + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw config_error(path_ + "." + key + ": expected an integer");
    return v.get<int>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw config_error(path_ + "." + key + ": expected true/false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw config_error(path_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw config_error(path_ + ": unknown key \"" + it.key() + "\"");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check_range(bool ok, const std::string& what) {
  if (!ok) throw config_error(what);
}

}  // namespace

EngineConfig EngineConfig::from_json(const json& j) {
  EngineConfig cfg;
  SectionReader top(j, "config");

  if (const json* c = top.raw("coefficients")) {
    SectionReader s(*c, "coefficients");
    cfg.preset_name = s.text("preset", cfg.preset_name);
    if (const json* p = s.raw("params")) {
      if (!p->is_object()) throw config_error("coefficients.params: expected a JSON object");
      cfg.preset_params = *p;
    }
    s.finish();
  }

  if (const json* g = top.raw("grids")) {
    SectionReader s(*g, "grids");
    cfg.grid.n = s.integer("n", cfg.grid.n);
    cfg.grid.m = s.integer("m", cfg.grid.m);
    cfg.grid.quadrature = s.integer("quadrature", cfg.grid.quadrature);
    s.finish();
    check_range(cfg.grid.n >= 2, "grids.n: need at least 2 cells per side, got " +
                                     std::to_string(cfg.grid.n));
    check_range(cfg.grid.m >= 1, "grids.m: need at least 1 cell per side, got " +
                                     std::to_string(cfg.grid.m));
    check_range(cfg.grid.quadrature == 2 || cfg.grid.quadrature == 3,
                "grids.quadrature: supported orders are 2 and 3, got " +
                    std::to_string(cfg.grid.quadrature));
  }

  if (const json* so = top.raw("solver")) {
    SectionReader s(*so, "solver");
    std::string method = s.text("method", "automatic");
    if (method == "automatic")
      cfg.solver.method = SolveMethod::automatic;
    else if (method == "direct_lu")
      cfg.solver.method = SolveMethod::direct_lu;
    else if (method == "bicgstab")
      cfg.solver.method = SolveMethod::bicgstab;
    else
      throw config_error("solver.method: expected automatic, direct_lu or bicgstab, got \"" +
                         method + "\"");
    cfg.solver.tolerance = s.number("tolerance", cfg.solver.tolerance);
    cfg.solver.max_iterations = s.integer("max_iterations", cfg.solver.max_iterations);
    s.finish();
    check_range(cfg.solver.tolerance > 0 && cfg.solver.tolerance <= 1e-2,
                "solver.tolerance: must lie in (0, 1e-2]");
    check_range(cfg.solver.max_iterations >= 1, "solver.max_iterations: must be positive");
  }

  if (const json* st = top.raw("study")) {
    SectionReader s(*st, "study");
    if (const json* lam = s.raw("lambda")) {
      if (lam->is_string()) {
        if (lam->get<std::string>() != "auto")
          throw config_error("study.lambda: expected a number or \"auto\"");
        cfg.problem.lambda_auto = true;
        cfg.problem.lambda = -1.0;
      } else if (lam->is_number()) {
        cfg.problem.lambda_auto = false;
        cfg.problem.lambda = lam->get<double>();
      } else {
        throw config_error("study.lambda: expected a number or \"auto\"");
      }
    }
    cfg.problem.mu_offset = s.number("mu_offset", cfg.problem.mu_offset);
    cfg.problem.rhs = s.text("rhs", cfg.problem.rhs);
    cfg.problem.rhs_perturbation = s.text("rhs_perturbation", cfg.problem.rhs_perturbation);
    if (const json* d = s.raw("deltas")) {
      if (!d->is_array() || d->empty())
        throw config_error("study.deltas: expected a nonempty array of numbers");
      cfg.problem.deltas.clear();
      for (const json& v : *d) {
        if (!v.is_number()) throw config_error("study.deltas: expected numbers");
        cfg.problem.deltas.push_back(v.get<double>());
      }
    }
    cfg.beta0_mode = s.text("beta0_mode", cfg.beta0_mode);
    cfg.basket = s.integer("basket", cfg.basket);
    if (const json* sd = s.raw("seed")) {
      if (sd->is_number_unsigned())
        cfg.seed = sd->get<std::uint64_t>();
      else if (sd->is_number_integer() && sd->get<std::int64_t>() >= 0)
        cfg.seed = static_cast<std::uint64_t>(sd->get<std::int64_t>());
      else
        throw config_error("study.seed: expected a nonnegative integer");
    }
    s.finish();
    check_range(cfg.problem.mu_offset > 0, "study.mu_offset: must be positive");
    check_range(cfg.basket >= 1, "study.basket: must be positive");
    check_range(cfg.beta0_mode == "auto" || cfg.beta0_mode == "analytic" ||
                    cfg.beta0_mode == "empirical",
                "study.beta0_mode: expected auto, analytic or empirical, got \"" + cfg.beta0_mode +
                    "\"");
    for (std::size_t i = 0; i < cfg.problem.deltas.size(); ++i) {
      double d = cfg.problem.deltas[i];
      check_range(d > 0 && d <= 1,
                  "study.deltas: scales must lie in (0, 1], got " + std::to_string(d));
      if (i > 0)
        check_range(d < cfg.problem.deltas[i - 1],
                    "study.deltas: scales must be strictly decreasing");
    }
    // Resolve the named functions now so typos fail at load time.
    named_rhs(cfg.problem.rhs);
    if (!cfg.problem.rhs_perturbation.empty()) named_rhs(cfg.problem.rhs_perturbation);
  }

  if (const json* o = top.raw("output")) {
    SectionReader s(*o, "output");
    cfg.output.csv = s.flag("csv", cfg.output.csv);
    cfg.output.plot = s.flag("plot", cfg.output.plot);
    s.finish();
  }

  top.finish();

  // Validate the preset name + params eagerly (construction performs the full
  // parameter check, including unknown preset keys).
  cfg.make_coefficient();
  return cfg;
}

json EngineConfig::to_json() const {
  json j;
  j["coefficients"] = {{"preset", preset_name}, {"params", preset_params}};
  j["grids"] = {{"n", grid.n}, {"m", grid.m}, {"quadrature", grid.quadrature}};
  std::string method = solver.method == SolveMethod::direct_lu  ? "direct_lu"
                       : solver.method == SolveMethod::bicgstab ? "bicgstab"
                                                                : "automatic";
  j["solver"] = {{"method", method},
                 {"tolerance", solver.tolerance},
                 {"max_iterations", solver.max_iterations}};
  json st;
  if (problem.lambda_auto)
    st["lambda"] = "auto";
  else
    st["lambda"] = problem.lambda;
  st["mu_offset"] = problem.mu_offset;
  st["rhs"] = problem.rhs;
  st["rhs_perturbation"] = problem.rhs_perturbation;
  st["deltas"] = problem.deltas;
  st["beta0_mode"] = beta0_mode;
  st["basket"] = basket;
  st["seed"] = seed;
  j["study"] = st;
  j["output"] = {{"csv", output.csv}, {"plot", output.plot}};
  return j;
}

TwoScaleCoefficient EngineConfig::make_coefficient() const {
  return make_preset(preset_name, preset_params);
}

SolverOptions EngineConfig::solver_options() const {
  SolverOptions o;
  o.method = solver.method;
  o.tolerance = solver.tolerance;
  o.max_iterations = solver.max_iterations;
  return o;
}

std::function<double(Vec2)> EngineConfig::rhs_function() const { return named_rhs(problem.rhs); }

std::function<double(Vec2)> EngineConfig::rhs_perturbation_function() const {
  if (problem.rhs_perturbation.empty())
    return [](Vec2) { return 0.0; };
  return named_rhs(problem.rhs_perturbation);
}

EngineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config file " + path + " is not valid JSON: " + e.what());
  }
  return EngineConfig::from_json(j);
}

std::function<double(Vec2)> named_rhs(const std::string& name) {
  if (name == "sinpi")
    return [](Vec2 x) { return std::sin(PI * x.x) * std::sin(PI * x.y); };
  if (name == "eigen")  // load whose lambda=0, A=I solution is sin(pi x1) sin(pi x2)
    return [](Vec2 x) { return 2.0 * PI * PI * std::sin(PI * x.x) * std::sin(PI * x.y); };
  if (name == "one") return [](Vec2) { return 1.0; };
  if (name == "poly")
    return [](Vec2 x) { return 16.0 * x.x * (1.0 - x.x) * x.y * (1.0 - x.y); };
  if (name == "cospi")
    return [](Vec2 x) { return std::cos(PI * x.x) * std::cos(PI * x.y); };
  if (name == "sinpi2")
    return [](Vec2 x) { return std::sin(2.0 * PI * x.x) * std::sin(2.0 * PI * x.y); };
  throw config_error("unknown right-hand side \"" + name +
                     "\" (known: sinpi, eigen, one, poly, cospi, sinpi2)");
}

}  // namespace homog
