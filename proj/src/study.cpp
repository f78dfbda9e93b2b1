#include "homog/study.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>

#include "homog/cell.hpp"
#include "homog/effective.hpp"
#include "homog/forms.hpp"
#include "homog/report.hpp"
#include "homog/unfold.hpp"

namespace homog {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

/// Re-throws with the study stage attached, preserving the error type (the CLI
/// maps config_error and solver_error to different exit codes).
template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const solver_error& e) {
    throw solver_error("[stage " + name + "] " + e.what());
  } catch (const config_error& e) {
    throw config_error("[stage " + name + "] " + e.what());
  }
}

Beta0Mode parse_mode(const std::string& mode) {
  if (mode == "auto") return Beta0Mode::automatic;
  if (mode == "analytic") return Beta0Mode::analytic;
  return Beta0Mode::empirical;  // config validated the name already
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

nlohmann::json row_json(const StudyRow& r) {
  return {{"delta", r.delta},         {"l2_err", r.l2_err},
          {"h1_err", r.h1_err},       {"energy", r.energy},
          {"energy_gap", r.energy_gap}, {"two_scale_err", r.two_scale_err}};
}

/// Shared setup for both studies: coefficient, grids, beta0, lambda,
/// correctors, effective data, homogenized solve.
struct StudyContext {
  TwoScaleCoefficient c;
  Grid macro, ygrid;
  double beta0 = 0.0, lambda = 0.0, effective_idx = 0.0;
  CorrectorSet cs;
  EffectiveCoefficients eff;
  AssembledForm eff_form;
  ScalarField u0{macro};
  double energy0 = 0.0;
  Eigen::VectorXd load_f, load_g;
  bool perturbed = false;
  nlohmann::json stages = nlohmann::json::object();

  StudyContext(const EngineConfig& cfg)
      : c(cfg.make_coefficient()),
        macro(GridKind::dirichlet, cfg.grid.n, cfg.grid.quadrature),
        ygrid(GridKind::periodic, cfg.grid.m, cfg.grid.quadrature) {
    auto t0 = clock_type::now();
    beta0 = stage("beta0", [&] {
      return compose_form_index(macro, c, cfg.problem.deltas, parse_mode(cfg.beta0_mode), cfg.seed,
                                cfg.basket);
    });
    stages["beta0"] = seconds_since(t0);

    lambda = cfg.problem.lambda_auto ? beta0 + 1.0 : cfg.problem.lambda;
    validate_study(cfg, beta0, lambda);

    t0 = clock_type::now();
    cs = stage("correctors", [&] { return solve_correctors(ygrid, c, &macro); });
    stages["correctors"] = seconds_since(t0);

    t0 = clock_type::now();
    eff = stage("effective", [&] {
      EffectiveCoefficients e = assemble_effective(c, cs, macro);
      check_effective_ellipticity(e);
      return e;
    });
    stages["effective"] = seconds_since(t0);

    t0 = clock_type::now();
    stage("homogenized", [&] {
      eff_form = assemble_effective_form(macro, eff, lambda);
      effective_idx = effective_index(eff_form, cfg.seed);
      if (!(lambda > effective_idx))
        throw config_error("shift lambda = " + fmt(lambda) +
                           " does not exceed the effective form's lower-bound index " +
                           fmt(effective_idx));
      load_f = assemble_load(macro, cfg.rhs_function());
      perturbed = !cfg.problem.rhs_perturbation.empty();
      if (perturbed) load_g = assemble_load(macro, cfg.rhs_perturbation_function());
      ResolventOperator op0(eff_form, cfg.solver_options());
      u0 = op0.apply_dual_vector(load_f);
      energy0 = eff_form.energy(u0);
      return 0;
    });
    stages["homogenized"] = seconds_since(t0);
  }

  nlohmann::json diagnostics(const EngineConfig& cfg) const {
    auto [qmin, qmax] = check_effective_ellipticity(eff);
    return {{"beta0", beta0},
            {"lambda", lambda},
            {"beta0_mode", cfg.beta0_mode},
            {"effective_index", effective_idx},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"effective_quad_min", qmin},
            {"effective_quad_max", qmax},
            {"corrector_residual", cs.worst_residual()},
            {"corrector_gradient_sum", cs.grad_sum_max},
            {"drift_gradient_bound", cs.drift_grad_bound},
            {"energy0", energy0}};
  }
};

StudyReport run_rows(const EngineConfig& cfg, bool two_scale, const std::string& kind) {
  const auto wall0 = std::chrono::system_clock::now();
  const auto t_all = clock_type::now();

  StudyContext ctx(cfg);

  // Detailed (pencil) diagnostics of the finest-scale oscillating form; the
  // study's own lambda check uses the composed estimator above.
  auto t0 = clock_type::now();
  FormDiagnostics fd = stage("diagnostics", [&] {
    AssembledForm f =
        assemble_resolvent_form(ctx.macro, ctx.c, cfg.problem.deltas.back(), ctx.lambda);
    return diagnose_form(f, 32, cfg.seed);
  });
  ctx.stages["diagnostics"] = seconds_since(t0);

  StudyReport rep;
  rep.lambda = ctx.lambda;
  rep.beta0 = ctx.beta0;

  for (double delta : cfg.problem.deltas) {
    const std::string tag = "delta=" + fmt(delta);
    t0 = clock_type::now();
    StudyRow row = stage(tag, [&] {
      StudyRow r;
      r.delta = delta;
      AssembledForm form = assemble_resolvent_form(ctx.macro, ctx.c, delta, ctx.lambda);
      ResolventOperator op(form, cfg.solver_options());
      Eigen::VectorXd rhs = ctx.load_f;
      if (ctx.perturbed) rhs += delta * ctx.load_g;
      ScalarField u = op.apply_dual_vector(rhs);

      ScalarField diff(ctx.macro);
      diff.v = u.v - ctx.u0.v;
      r.l2_err = std::sqrt(l2_norm_sq(diff));
      r.h1_err = std::sqrt(h1_seminorm_sq(diff));
      r.energy = form.energy(u);
      r.energy_gap = std::abs(r.energy - ctx.energy0);
      if (two_scale) {
        TwoScaleReconstruction rec(ctx.u0, ctx.cs);
        r.two_scale_err = two_scale_error(u, rec, build_partition(delta), ctx.ygrid);
      }
      return r;
    });
    ctx.stages[tag] = seconds_since(t0);
    rep.rows.push_back(row);
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const StudyRow& r : rep.rows) rows.push_back(row_json(r));

  nlohmann::json diag = ctx.diagnostics(cfg);
  diag["form"] = {{"beta0_exact", fd.beta0},
                  {"sector_bound", fd.sector_bound},
                  {"kappa1_sampled", fd.kappa1_sampled},
                  {"kappa2_sampled", fd.kappa2_sampled},
                  {"kappa1_exact", fd.kappa1_exact},
                  {"friedrichs", fd.friedrichs},
                  {"pencil_m_matrix", fd.pencil_m_matrix}};

  rep.report = {{"kind", kind},
                {"config", cfg.to_json()},
                {"diagnostics", diag},
                {"effective", ctx.eff.to_json()},
                {"rows", rows}};
  rep.timing = {
      {"started_unix_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(wall0.time_since_epoch()).count()},
      {"stages", ctx.stages},
      {"total_seconds", seconds_since(t_all)}};
  return rep;
}

}  // namespace

void validate_study(const EngineConfig& cfg, double beta0, double lambda) {
  if (cfg.problem.deltas.empty()) throw config_error("study: empty scale list");
  const int n = cfg.grid.n, m = cfg.grid.m;
  for (double d : cfg.problem.deltas) {
    if (!(d > 0.0) || !(d <= 1.0))
      throw config_error("study: scale " + fmt(d) + " outside (0, 1]");
    const double k = std::round(std::log2(1.0 / d));
    if (std::abs(d * std::exp2(k) - 1.0) > 1e-12)
      throw config_error("study: scale " + fmt(d) + " is not dyadic (1/2^k)");
    const double nd = n * d;
    if (std::abs(nd - std::round(nd)) > 1e-9 || std::round(nd) < 1.0)
      throw config_error("study: n * delta = " + fmt(nd) + " is not a positive integer (n = " +
                         std::to_string(n) + ", delta = " + fmt(d) + ")");
    const long long cells = static_cast<long long>(std::llround(nd));
    if (cells < 8)
      throw config_error("study: macro resolution too coarse for delta = " + fmt(d) + ": h = " +
                         fmt(1.0 / n) + " exceeds delta/8 = " + fmt(d / 8.0));
    if (m % cells != 0)
      throw config_error("study: unit-cell resolution m = " + std::to_string(m) +
                         " is not a multiple of n * delta = " + std::to_string(cells));
  }
  if (!(lambda > beta0))
    throw config_error("study: shift lambda = " + fmt(lambda) +
                       " does not exceed the form's lower-bound index beta0 = " + fmt(beta0) +
                       "; no solve attempted");
}

StudyReport run_convergence(const EngineConfig& cfg) { return run_rows(cfg, true, "convergence"); }

StudyReport run_resolvent_convergence(const EngineConfig& cfg) {
  return run_rows(cfg, false, "resolvent");
}

void write_study_outputs(const StudyReport& rep, const EngineConfig& cfg,
                         const std::string& out_dir, const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/" + stem;
  write_json_file(base + ".json", rep.full());
  if (cfg.output.csv) {
    std::vector<std::vector<double>> rows;
    for (const StudyRow& r : rep.rows)
      rows.push_back({r.delta, r.l2_err, r.h1_err, r.energy, r.energy_gap, r.two_scale_err});
    write_csv_file(base + ".csv",
                   {"delta", "l2_err", "h1_err", "energy", "energy_gap", "two_scale_err"}, rows);
  }
  if (cfg.output.plot) {
    std::vector<double> x;
    PlotSeries l2{"l2_err", {}}, gap{"energy_gap", {}}, ts{"two_scale_err", {}};
    for (const StudyRow& r : rep.rows) {
      x.push_back(r.delta);
      l2.y.push_back(r.l2_err);
      gap.y.push_back(r.energy_gap);
      ts.y.push_back(r.two_scale_err);
    }
    std::vector<PlotSeries> series = {l2, gap};
    bool any_ts = false;
    for (double v : ts.y) any_ts = any_ts || v > 0;
    if (any_ts) series.push_back(ts);
    write_loglog_svg(base + ".svg", "convergence vs scale", "delta", x, series);
  }
}

}  // namespace homog
