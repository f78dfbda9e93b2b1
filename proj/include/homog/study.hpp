#pragma once
/// @file study.hpp
/// @brief Convergence studies over a list of scales delta: solve the
///        oscillating problem per delta, the homogenized limit once, and
///        tabulate solution / energy / two-scale gradient errors. Reports are
///        deterministic for a fixed config+seed; wall-clock data lives in a
///        separate timing object.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homog/config.hpp"

namespace homog {

struct StudyRow {
  double delta = 0.0;
  double l2_err = 0.0;        ///< ||u_delta - u_0||_{L2}
  double h1_err = 0.0;        ///< ||grad(u_delta - u_0)||_{L2} (reported only)
  double energy = 0.0;        ///< E^delta_lambda(u_delta, u_delta)
  double energy_gap = 0.0;    ///< |energy - E^0_lambda(u_0, u_0)|
  double two_scale_err = 0.0; ///< gradient unfolding error (convergence study)
};

struct StudyReport {
  nlohmann::json report;  ///< deterministic payload (config, diagnostics, rows)
  nlohmann::json timing;  ///< timestamps and runtimes, excluded from determinism
  std::vector<StudyRow> rows;
  double lambda = 0.0;
  double beta0 = 0.0;

  nlohmann::json full() const {
    return nlohmann::json{{"report", report}, {"timing", timing}};
  }
};

/// Grid/scale compatibility for unfolding studies: every delta must be dyadic
/// (1/2^k), n delta integral, h <= delta/8, and m a multiple of n delta.
/// lambda must exceed the form's lower-bound index. Throws config_error naming
/// the violated bound (and the offending values).
void validate_study(const EngineConfig& cfg, double beta0, double lambda);

/// Homogenization convergence study (solution, energy, two-scale gradient).
StudyReport run_convergence(const EngineConfig& cfg);

/// Resolvent-family convergence: data f_delta = f + delta g, tabulating
/// ||G^delta_lambda f_delta - G^0_lambda f|| and the energy gap.
StudyReport run_resolvent_convergence(const EngineConfig& cfg);

/// Write report.json (+ rows.csv, plot.svg per the output config) into out_dir.
void write_study_outputs(const StudyReport& rep, const EngineConfig& cfg,
                         const std::string& out_dir, const std::string& stem);

}  // namespace homog
