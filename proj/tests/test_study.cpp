#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "homog/study.hpp"

using namespace homog;
using nlohmann::json;

namespace {
EngineConfig small_study() {
  json j = {{"coefficients", {{"preset", "layered"}}},
            {"grids", {{"n", 64}, {"m", 16}}},
            {"study", {{"deltas", {0.25, 0.125}}, {"seed", 2}}},
            {"output", {{"csv", true}, {"plot", true}}}};
  return EngineConfig::from_json(j);
}
}  // namespace

TEST_CASE("study validation names each violated bound") {
  EngineConfig cfg = small_study();

  EngineConfig bad = cfg;
  bad.problem.deltas = {0.3};
  CHECK_THROWS_WITH_AS(validate_study(bad, 0.0, 1.0), doctest::Contains("not dyadic"),
                       config_error);

  bad = cfg;
  bad.grid.n = 30;
  bad.problem.deltas = {0.25};
  CHECK_THROWS_WITH_AS(validate_study(bad, 0.0, 1.0),
                       doctest::Contains("is not a positive integer"), config_error);

  bad = cfg;
  bad.grid.n = 16;  // 16 * 0.25 = 4 cells per period: too coarse
  bad.problem.deltas = {0.25};
  CHECK_THROWS_WITH_AS(validate_study(bad, 0.0, 1.0), doctest::Contains("too coarse"),
                       config_error);

  bad = cfg;
  bad.grid.m = 12;  // not a multiple of 64 * 0.25 = 16
  bad.problem.deltas = {0.25};
  CHECK_THROWS_WITH_AS(validate_study(bad, 0.0, 1.0), doctest::Contains("not a multiple"),
                       config_error);

  CHECK_THROWS_WITH_AS(validate_study(cfg, 2.0, 1.5), doctest::Contains("no solve attempted"),
                       config_error);

  validate_study(cfg, 0.0, 1.0);  // the base config is fine
}

TEST_CASE("convergence study: decreasing errors and a deterministic report") {
  EngineConfig cfg = small_study();
  StudyReport rep = run_convergence(cfg);

  CHECK(rep.beta0 == 0.0);     // no lower-order terms
  CHECK(rep.lambda == 1.0);    // auto: beta0 + 1
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].delta == 0.25);
  CHECK(rep.rows[1].delta == 0.125);
  CHECK(rep.rows[1].l2_err < rep.rows[0].l2_err);
  for (const StudyRow& r : rep.rows) {
    CHECK(r.l2_err > 0.0);
    CHECK(r.h1_err > 0.0);
    CHECK(r.energy > 0.0);
    CHECK(r.two_scale_err > 0.0);
  }

  CHECK(rep.report.at("kind") == "convergence");
  CHECK(rep.report.contains("diagnostics"));
  CHECK(rep.report.at("diagnostics").at("beta0") == 0.0);
  CHECK(rep.report.at("diagnostics").at("form").contains("sector_bound"));
  CHECK(rep.report.at("effective").at("x_independent") == true);

  // the embedded config round-trips through the loader
  EngineConfig back = EngineConfig::from_json(rep.report.at("config"));
  CHECK(back.to_json() == cfg.to_json());

  // bitwise determinism of the report payload (timing may differ)
  StudyReport rep2 = run_convergence(cfg);
  CHECK(rep.report == rep2.report);
  CHECK(rep.timing.contains("stages"));
  CHECK(rep.timing.at("total_seconds").get<double>() > 0.0);
}

TEST_CASE("resolvent study perturbs the data and skips unfolding") {
  EngineConfig cfg = small_study();
  cfg.problem.rhs_perturbation = "cospi";
  StudyReport rep = run_resolvent_convergence(cfg);
  CHECK(rep.report.at("kind") == "resolvent");
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].l2_err < rep.rows[0].l2_err);
  for (const StudyRow& r : rep.rows) CHECK(r.two_scale_err == 0.0);

  // identical data, no perturbation: strictly smaller errors than perturbed
  EngineConfig plain = small_study();
  StudyReport rep0 = run_resolvent_convergence(plain);
  CHECK(rep0.rows[0].l2_err != rep.rows[0].l2_err);
}

TEST_CASE("solver failures surface with the study stage attached") {
  EngineConfig cfg = small_study();
  cfg.solver.method = SolveMethod::bicgstab;
  cfg.solver.max_iterations = 1;
  cfg.solver.tolerance = 1e-12;
  CHECK_THROWS_WITH_AS(run_convergence(cfg), doctest::Contains("[stage homogenized]"),
                       solver_error);
}

TEST_CASE("study outputs: json, csv, and svg files") {
  namespace fs = std::filesystem;
  EngineConfig cfg = small_study();
  cfg.problem.deltas = {0.25};
  StudyReport rep = run_convergence(cfg);

  fs::path dir = fs::temp_directory_path() / "homog_test_study_out";
  fs::remove_all(dir);
  write_study_outputs(rep, cfg, dir.string(), "study");

  std::ifstream jf(dir / "study.json");
  REQUIRE(jf.good());
  json full = json::parse(jf);
  CHECK(full.at("report") == rep.report);
  CHECK(full.contains("timing"));

  std::ifstream cf(dir / "study.csv");
  REQUIRE(cf.good());
  std::string header;
  std::getline(cf, header);
  CHECK(header == "delta,l2_err,h1_err,energy,energy_gap,two_scale_err");
  std::string row;
  CHECK(std::getline(cf, row).good());

  std::ifstream sf(dir / "study.svg");
  REQUIRE(sf.good());
  std::string svg((std::istreambuf_iterator<char>(sf)), std::istreambuf_iterator<char>());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("l2_err") != std::string::npos);

  fs::remove_all(dir);
}
