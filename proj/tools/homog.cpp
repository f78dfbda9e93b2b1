// homog: batch front end for the homogenization engine.
//
//   homog <subcommand> --config cfg.json [--out DIR] [--threads N]
//                      [--seed U64] [--quiet]
//
// Subcommands: correctors, effective, solve, convergence, resolvent,
// diagnostics, unfold-check. Exit codes: 0 success, 1 validation/config error,
// 2 solver failure. HOM_LOG=0|1|2 controls stderr verbosity (--quiet wins).

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homog/cell.hpp"
#include "homog/common.hpp"
#include "homog/config.hpp"
#include "homog/effective.hpp"
#include "homog/forms.hpp"
#include "homog/report.hpp"
#include "homog/solver.hpp"
#include "homog/study.hpp"
#include "homog/unfold.hpp"

namespace {

using homog::EngineConfig;
using nlohmann::json;

int g_verbosity = 1;

void log_line(int level, const std::string& msg) {
  if (g_verbosity >= level) std::cerr << "homog: " << msg << '\n';
}

struct Session {
  EngineConfig cfg;
  std::string out_dir;
};

void emit(const Session& s, const std::string& stem, const json& payload) {
  std::filesystem::create_directories(s.out_dir);
  const std::string path = s.out_dir + "/" + stem + ".json";
  homog::write_json_file(path, payload);
  log_line(1, "wrote " + path);
}

// --- subcommand bodies ------------------------------------------------------

int cmd_correctors(const Session& s) {
  const EngineConfig& cfg = s.cfg;
  homog::TwoScaleCoefficient c = cfg.make_coefficient();
  homog::Grid ygrid(homog::GridKind::periodic, cfg.grid.m, cfg.grid.quadrature);
  homog::Grid macro(homog::GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature);
  homog::CorrectorSet cs = homog::solve_correctors(ygrid, c, &macro);

  json j;
  j["config"] = cfg.to_json();
  j["x_independent"] = cs.x_independent;
  j["stations"] = cs.x_independent ? 1 : static_cast<int>(cs.at.size());
  j["worst_residual"] = cs.worst_residual();
  j["drift_gradient_bound"] = cs.drift_grad_bound;
  j["gradient_sum_max"] = cs.grad_sum_max;
  const auto& p0 = cs.station(0);
  j["gradient_norms"] = {p0.grad_norm[0], p0.grad_norm[1], p0.grad_norm[2]};
  emit(s, "correctors", j);

  if (cfg.output.csv) {
    std::vector<std::vector<double>> rows;
    const homog::Grid& g = *p0.w[0].grid;
    for (int jn = 0; jn < g.n; ++jn)
      for (int in = 0; in < g.n; ++in) {
        homog::Vec2 y = g.node_coord(in, jn);
        rows.push_back({y.x, y.y, p0.w[0].nodal(in, jn), p0.w[1].nodal(in, jn),
                        p0.w[2].nodal(in, jn)});
      }
    homog::write_csv_file(s.out_dir + "/correctors.csv", {"y1", "y2", "w1", "w2", "w0"}, rows);
  }
  return 0;
}

int cmd_effective(const Session& s) {
  const EngineConfig& cfg = s.cfg;
  homog::TwoScaleCoefficient c = cfg.make_coefficient();
  homog::Grid ygrid(homog::GridKind::periodic, cfg.grid.m, cfg.grid.quadrature);
  homog::Grid macro(homog::GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature);
  homog::CorrectorSet cs = homog::solve_correctors(ygrid, c, &macro);
  homog::EffectiveCoefficients eff = homog::assemble_effective(c, cs, macro);
  auto [qmin, qmax] = homog::check_effective_ellipticity(eff);

  json j;
  j["config"] = cfg.to_json();
  j["effective"] = eff.to_json();
  j["quad_min"] = qmin;
  j["quad_max"] = qmax;
  emit(s, "effective", j);
  return 0;
}

int cmd_solve(const Session& s) {
  const EngineConfig& cfg = s.cfg;
  homog::TwoScaleCoefficient c = cfg.make_coefficient();
  homog::Grid macro(homog::GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature);

  double beta0 = homog::compose_form_index(
      macro, c, cfg.problem.deltas,
      cfg.beta0_mode == "analytic"    ? homog::Beta0Mode::analytic
      : cfg.beta0_mode == "empirical" ? homog::Beta0Mode::empirical
                                      : homog::Beta0Mode::automatic,
      cfg.seed, cfg.basket);
  double lambda = cfg.problem.lambda_auto ? beta0 + 1.0 : cfg.problem.lambda;
  if (!(lambda > beta0))
    throw homog::config_error("solve: shift lambda = " + std::to_string(lambda) +
                              " does not exceed the lower-bound index beta0 = " +
                              std::to_string(beta0));

  Eigen::VectorXd load = homog::assemble_load(macro, cfg.rhs_function());
  json cases = json::array();
  for (std::size_t i = 0; i < cfg.problem.deltas.size(); ++i) {
    double delta = cfg.problem.deltas[i];
    homog::AssembledForm form = homog::assemble_resolvent_form(macro, c, delta, lambda);
    homog::ResolventOperator op(form, cfg.solver_options());
    homog::ScalarField u = op.apply_dual_vector(load);
    const homog::SolveStats& st = op.last_stats();
    cases.push_back({{"delta", delta},
                     {"energy", form.energy(u)},
                     {"l2_norm", std::sqrt(homog::l2_norm_sq(u))},
                     {"h1_norm", homog::h1_norm(u)},
                     {"solver", {{"method", st.method},
                                 {"iterations", st.iterations},
                                 {"residual", st.residual}}}});
    if (cfg.output.csv) {
      std::vector<std::vector<double>> rows;
      for (int jn = 0; jn <= macro.n; ++jn)
        for (int in = 0; in <= macro.n; ++in) {
          homog::Vec2 x = macro.node_coord(in, jn);
          rows.push_back({x.x, x.y, u.nodal(in, jn)});
        }
      homog::write_csv_file(s.out_dir + "/solution_" + std::to_string(i) + ".csv",
                            {"x1", "x2", "u"}, rows);
    }
  }

  json j;
  j["config"] = cfg.to_json();
  j["beta0"] = beta0;
  j["lambda"] = lambda;
  j["cases"] = cases;
  emit(s, "solve", j);
  return 0;
}

int run_study(const Session& s, bool resolvent) {
  const char* stem = resolvent ? "resolvent" : "convergence";
  homog::StudyReport rep =
      resolvent ? homog::run_resolvent_convergence(s.cfg) : homog::run_convergence(s.cfg);
  std::filesystem::create_directories(s.out_dir);
  homog::write_study_outputs(rep, s.cfg, s.out_dir, stem);
  log_line(1, std::string("wrote ") + s.out_dir + "/" + stem + ".json");
  if (g_verbosity >= 1) {
    std::cout << "delta        l2_err        energy_gap    two_scale_err\n";
    for (const auto& r : rep.rows) {
      char line[160];
      std::snprintf(line, sizeof line, "%-12.6g %-13.6g %-13.6g %-13.6g\n", r.delta, r.l2_err,
                    r.energy_gap, r.two_scale_err);
      std::cout << line;
    }
  }
  return 0;
}

int cmd_diagnostics(const Session& s) {
  const EngineConfig& cfg = s.cfg;
  homog::TwoScaleCoefficient c = cfg.make_coefficient();
  homog::Grid macro(homog::GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature);

  double beta0 = homog::compose_form_index(
      macro, c, cfg.problem.deltas,
      cfg.beta0_mode == "analytic"    ? homog::Beta0Mode::analytic
      : cfg.beta0_mode == "empirical" ? homog::Beta0Mode::empirical
                                      : homog::Beta0Mode::automatic,
      cfg.seed, cfg.basket);
  double lambda = cfg.problem.lambda_auto ? beta0 + 1.0 : cfg.problem.lambda;
  homog::AssembledForm form =
      homog::assemble_resolvent_form(macro, c, cfg.problem.deltas.front(), lambda);
  homog::FormDiagnostics d = homog::diagnose_form(form, 64, cfg.seed);
  double garding = homog::check_garding(form, d.beta0, 64, cfg.seed);

  json j;
  j["config"] = cfg.to_json();
  j["beta0"] = beta0;
  j["lambda"] = lambda;
  j["beta0_exact"] = d.beta0;
  j["sector_bound"] = d.sector_bound;
  j["kappa1_sampled"] = d.kappa1_sampled;
  j["kappa2_sampled"] = d.kappa2_sampled;
  j["kappa1_exact"] = d.kappa1_exact;
  j["friedrichs"] = d.friedrichs;
  j["pencil_m_matrix"] = d.pencil_m_matrix;
  j["garding_min"] = garding;
  emit(s, "diagnostics", j);
  return 0;
}

int cmd_unfold_check(const Session& s) {
  const EngineConfig& cfg = s.cfg;
  homog::Grid macro(homog::GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature);
  homog::Grid ygrid(homog::GridKind::periodic, cfg.grid.m, cfg.grid.quadrature);

  json cases = json::array();
  double worst_identity = 0.0, worst_contraction = 0.0;
  for (double delta : cfg.problem.deltas) {
    homog::UnfoldPartition part = homog::build_partition(delta);
    double wid = 0.0, wc = 0.0;
    homog::Rng rng(cfg.seed);
    for (int i = 0; i < 20; ++i) {
      homog::ScalarField u = homog::random_smooth_field(macro, rng.integer());
      wid = std::max(wid, homog::check_integral_identity(u, part, ygrid));
      homog::UnfoldedField T = homog::unfold(u, part, ygrid);
      double lhs = T.l2_norm_sq();
      double rhs = homog::l2_norm_sq(u);
      wc = std::max(wc, lhs - rhs);
    }
    cases.push_back({{"delta", delta},
                     {"aligned_macro", part.aligned_macro(macro)},
                     {"aligned_micro", part.aligned_micro(macro, ygrid)},
                     {"integral_identity_max", wid},
                     {"contraction_excess_max", wc}});
    worst_identity = std::max(worst_identity, wid);
    worst_contraction = std::max(worst_contraction, wc);
  }

  const bool pass = worst_identity <= 1e-12 && worst_contraction <= 1e-10;
  json j;
  j["config"] = cfg.to_json();
  j["cases"] = cases;
  j["pass"] = pass;
  emit(s, "unfold_check", j);
  if (!pass)
    throw homog::config_error("unfold-check failed: identity deviation " +
                              std::to_string(worst_identity) + ", contraction excess " +
                              std::to_string(worst_contraction));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical homogenization for nonsymmetric second-order forms"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--threads", threads, "cap worker threads (default: hardware)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config's seed");
  app.add_flag("--quiet", quiet, "suppress progress output");

  const char* names[] = {"correctors", "effective",   "solve",       "convergence",
                         "resolvent",  "diagnostics", "unfold-check"};
  const char* descs[] = {"solve the unit-cell profiles",
                         "assemble the effective coefficients",
                         "solve the oscillating problem per scale",
                         "homogenization convergence study",
                         "resolvent-family convergence study",
                         "form diagnostics (index, sector, coercivity)",
                         "unfolding operator invariants"};
  for (int i = 0; i < 7; ++i) app.add_subcommand(names[i], descs[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (const char* lv = std::getenv("HOM_LOG")) g_verbosity = std::atoi(lv);
  if (quiet) g_verbosity = 0;
  if (threads > 0) homog::set_worker_threads(threads);

  try {
    Session s;
    s.cfg = homog::load_config_file(config_path);
    s.out_dir = out_dir;
    std::filesystem::create_directories(s.out_dir);
    if (seed_opt->count() > 0) s.cfg.seed = seed;

    const std::string cmd = app.get_subcommands().front()->get_name();
    log_line(2, "subcommand " + cmd + ", config " + config_path);
    if (cmd == "correctors") return cmd_correctors(s);
    if (cmd == "effective") return cmd_effective(s);
    if (cmd == "solve") return cmd_solve(s);
    if (cmd == "convergence") return run_study(s, false);
    if (cmd == "resolvent") return run_study(s, true);
    if (cmd == "diagnostics") return cmd_diagnostics(s);
    return cmd_unfold_check(s);
  } catch (const homog::solver_error& e) {
    std::cerr << "homog: solver failure: " << e.what() << '\n';
    return 2;
  } catch (const homog::config_error& e) {
    std::cerr << "homog: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "homog: " << e.what() << '\n';
    return 1;
  }
}
