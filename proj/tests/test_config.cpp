#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "wavelab/config.hpp"
#include "wavelab/types.hpp"

using namespace wavelab;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("wavelab-config-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("configs round trip through their canonical text") {
  ExperimentConfig cfg;
  cfg.experiment = "scatter-sweep";
  cfg.model.family = "inverse-square-model";
  cfg.model.a = 0.7;
  cfg.grids.lambda = {0.1, 0.5, 2.0};
  cfg.output_dir = "/tmp/somewhere";
  cfg.seed = 42;

  const std::string text = serialize_config(cfg);
  const ExperimentConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.model.a == 0.7);
  CHECK(back.grids.lambda == cfg.grids.lambda);
  CHECK(back.seed == 42);

  // sparse input: unmentioned fields take their defaults, key order is
  // irrelevant to the canonical form
  const std::string sparse = R"({
    "grids": {"lambda": [0.1, 0.5, 2.0]},
    "seed": 42,
    "output_dir": "/tmp/somewhere",
    "model": {"a": 0.7, "family": "inverse-square-model"},
    "experiment": "scatter-sweep"
  })";
  const ExperimentConfig sparse_cfg = parse_config(sparse);
  CHECK(serialize_config(sparse_cfg) == text);
  CHECK(config_hash(sparse_cfg) == config_hash(cfg));

  // hashes respond to values
  ExperimentConfig other = cfg;
  other.grids.lambda.back() = 2.5;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("unknown keys are rejected together") {
  const std::string text = R"({
    "experiment": "scatter-sweep",
    "modle": "typo",
    "model": {"famly": "free", "family": "free"},
    "grids": {"lambda": [1.0], "lambdas": [2.0]}
  })";
  try {
    parse_config(text);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("modle") != std::string::npos);
    CHECK(msg.find("model.famly") != std::string::npos);
    CHECK(msg.find("grids.lambdas") != std::string::npos);
  }
}

TEST_CASE("validation names every offending field") {
  ExperimentConfig cfg;
  cfg.experiment = "scatter-sweep";
  cfg.grids.lambda = {};  // required for this pipeline
  cfg.grids.x = {3.0, 1.0};
  cfg.tolerances.abs_tol = -1.0;
  try {
    validate_config(cfg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("grids.lambda") != std::string::npos);
    CHECK(msg.find("grids.x") != std::string::npos);
    CHECK(msg.find("tolerances.abs_tol") != std::string::npos);
  }

  ExperimentConfig evolve;
  evolve.experiment = "evolve";
  evolve.grids.x = {5.0};
  evolve.grids.t = {};
  try {
    validate_config(evolve);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("grids.t") != std::string::npos);
  }
}

TEST_CASE("bad enum values are named") {
  ExperimentConfig cfg;
  cfg.experiment = "time-travel";
  cfg.model.family = "squircle";
  cfg.propagator = "warp";
  cfg.fd.boundary = "open";
  cfg.data.profile = "sawtooth";
  try {
    validate_config(cfg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("experiment") != std::string::npos);
    CHECK(msg.find("model.family") != std::string::npos);
    CHECK(msg.find("propagator") != std::string::npos);
    CHECK(msg.find("fd.boundary") != std::string::npos);
    CHECK(msg.find("data.profile") != std::string::npos);
  }
}

TEST_CASE("scatter sweep emits deterministic six-column tables") {
  ExperimentConfig cfg;
  cfg.experiment = "scatter-sweep";
  cfg.model.family = "inverse-square-model";
  cfg.model.a = 0.7;
  for (int k = 0; k < 8; ++k)
    cfg.grids.lambda.push_back(0.1 * std::pow(20.0, k / 7.0));
  cfg.output_dir = fresh_dir("sweep-a");

  const RunManifest m = run_experiment(cfg);
  CHECK(m.tool_version == std::string(kToolVersion));
  CHECK(m.config_hash_hex == config_hash(cfg));
  CHECK(m.wall_seconds >= 0.0);
  REQUIRE(!m.artifacts.empty());

  const fs::path csv_path = fs::path(cfg.output_dir) / "scatter_sweep.csv";
  REQUIRE(fs::exists(csv_path));
  const std::string csv = slurp(csv_path);
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() == 9);  // header + 8 lambda rows
  CHECK(rows[0] == "lambda,ReW,ImW,absT,absR,unitarity_defect");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split_csv(rows[i]);
    REQUIRE(cells.size() == 6);
    const double absT = std::strtod(cells[3].c_str(), nullptr);
    const double defect = std::strtod(cells[5].c_str(), nullptr);
    CHECK(absT > 0.0);
    CHECK(absT <= 1.0 + 1e-12);
    CHECK(defect < 1e-8);
  }

  // sidecar documents the columns and names the producing config
  const std::string side = slurp(fs::path(cfg.output_dir) / "scatter_sweep.csv.meta.json");
  const auto meta = nlohmann::json::parse(side);
  CHECK(meta.at("config_hash").get<std::string>() == config_hash(cfg));
  CHECK(meta.at("columns").size() == 6);

  // manifest records the full effective config
  const auto manifest =
      nlohmann::json::parse(slurp(fs::path(cfg.output_dir) / "manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>() == config_hash(cfg));
  CHECK(manifest.at("config").at("model").at("a").get<double>() == 0.7);

  // identical config, fresh directory: byte-identical table
  ExperimentConfig again = cfg;
  again.output_dir = fresh_dir("sweep-b");
  run_experiment(again);
  CHECK(slurp(fs::path(again.output_dir) / "scatter_sweep.csv") == csv);

  // no temp files left behind by the atomic writes
  for (const auto& entry : fs::directory_iterator(cfg.output_dir))
    CHECK(entry.path().string().find(".tmp") == std::string::npos);
}

TEST_CASE("potential dump matches the model pointwise") {
  ExperimentConfig cfg;
  cfg.experiment = "potential-dump";
  cfg.model.family = "inverse-square-peak";
  cfg.model.strength = 2.0;
  cfg.grids.x = {-2.0, -1.0, 0.0, 1.0, 2.0};
  cfg.output_dir = fresh_dir("dump");
  run_experiment(cfg);

  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "potential.csv"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "x,V");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split_csv(rows[i]);
    REQUIRE(cells.size() == 2);
    const double x = std::strtod(cells[0].c_str(), nullptr);
    const double v = std::strtod(cells[1].c_str(), nullptr);
    CHECK(x == cfg.grids.x[i - 1]);  // %.17g round-trips doubles exactly
    CHECK(v == 2.0 / (1.0 + x * x));
  }
}

TEST_CASE("wave fields flatten to long-format rows") {
  WaveField f;
  f.propagator = Propagator::sinc;
  f.times = {1.0, 2.0, 3.0};
  f.stations = {0.0, 1.0, 2.0, 3.0, 4.0};
  for (std::size_t it = 0; it < 3; ++it)
    for (std::size_t ix = 0; ix < 5; ++ix)
      f.values.push_back(cplx(static_cast<double>(it) - 1.5, 0.0));

  const std::string dir = fresh_dir("flatten");
  const auto paths = emit_plotdata(f, dir, "field", "deadbeefdeadbeef");
  REQUIRE(paths.size() == 2);
  const auto rows = lines_of(slurp(paths[0]));
  REQUIRE(rows.size() == 16);  // header + 3 x 5 samples
  CHECK(rows[0] == "t,x,value,abs_value");
  const auto cells = split_csv(rows[1]);
  REQUIRE(cells.size() == 4);
  CHECK(std::strtod(cells[2].c_str(), nullptr) == -1.5);
  CHECK(std::strtod(cells[3].c_str(), nullptr) == 1.5);
}

TEST_CASE("evolve pipeline writes the recorded grid") {
  ExperimentConfig cfg;
  cfg.experiment = "evolve";
  cfg.model.family = "free";
  cfg.propagator = "sinc";
  cfg.data.profile = "gaussian";
  cfg.grids.x = {5.0};
  cfg.grids.t = {1.0, 2.0, 3.0};
  cfg.output_dir = fresh_dir("evolve");
  const RunManifest m = run_experiment(cfg);
  REQUIRE(!m.artifacts.empty());
  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "evolve.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "t,x,value,abs_value");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split_csv(rows[i]);
    REQUIRE(cells.size() == 4);
    CHECK(std::strtod(cells[1].c_str(), nullptr) == 5.0);
    const double v = std::strtod(cells[2].c_str(), nullptr);
    const double av = std::strtod(cells[3].c_str(), nullptr);
    CHECK(av == std::abs(v));
  }
}

TEST_CASE("fdtd pipeline mirrors the station schema") {
  ExperimentConfig cfg;
  cfg.experiment = "fdtd";
  cfg.model.family = "free";
  cfg.propagator = "sinc";
  cfg.data.profile = "gaussian";
  cfg.grids.x = {3.0};
  cfg.grids.t = {5.0, 10.0, 15.0};
  cfg.fd.half_width = 40.0;
  cfg.fd.step = 0.1;
  cfg.fd.final_time = 16.0;
  cfg.output_dir = fresh_dir("fdtd");
  run_experiment(cfg);

  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "fdtd.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "t,x,value,abs_value");
  // once the integration window swallows the whole gaussian, the sinc
  // solution plateaus at half the data mean = sqrt(2 pi)/2
  const auto cells = split_csv(rows[2]);
  const double t = std::strtod(cells[0].c_str(), nullptr);
  const double v = std::strtod(cells[2].c_str(), nullptr);
  CHECK(t == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(v == doctest::Approx(std::sqrt(2.0 * M_PI) / 2.0).epsilon(5e-3));
}

TEST_CASE("wkb sweep emits the ten declared columns") {
  ExperimentConfig cfg;
  cfg.experiment = "wkb-sweep";
  cfg.model.family = "inverse-square-peak";
  cfg.model.strength = 2.0;
  cfg.grids.energy = {0.3, 0.5};
  cfg.grids.hbar = {0.1};
  cfg.output_dir = fresh_dir("wkb");
  run_experiment(cfg);

  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "wkb_sweep.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] ==
        "E,hbar,x1,x2,S,Tplus,Tminus,abs_sigma11,abs_T_exact,rel_dev");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split_csv(rows[i]);
    REQUIRE(cells.size() == 10);
    const double x1 = std::strtod(cells[2].c_str(), nullptr);
    const double x2 = std::strtod(cells[3].c_str(), nullptr);
    const double rel = std::strtod(cells[9].c_str(), nullptr);
    CHECK(std::abs(x2 + x1) < 1e-10);  // symmetric barrier
    CHECK(rel < 0.05);
  }
}

TEST_CASE("fit pipelines read series tables back") {
  // synthesize a clean station series and write it in the station schema
  WaveField f;
  f.propagator = Propagator::sinc;
  f.stations = {5.0};
  for (int k = 0; k < 60; ++k) {
    const double t = 100.0 * std::pow(10.0, k / 59.0);
    f.times.push_back(t);
    f.values.push_back(cplx(std::pow(t, -2.4), 0.0));
  }
  const std::string dir = fresh_dir("fit");
  const auto paths = emit_plotdata(f, dir, "series", "feedfacefeedface");

  ExperimentConfig cfg;
  cfg.experiment = "fit";
  cfg.fit.input = paths[0];
  cfg.fit.window_lo = 100.0;
  cfg.fit.window_hi = 1000.0;
  cfg.fit.station = 5.0;
  cfg.output_dir = dir;
  run_experiment(cfg);

  const auto report = nlohmann::json::parse(slurp(fs::path(dir) / "fit.json"));
  CHECK(report.at("alpha_hat").get<double>() ==
        doctest::Approx(2.4).epsilon(1e-9));
  CHECK(report.at("station").get<double>() == 5.0);
  CHECK(report.at("envelope_points").get<int>() == 60);
  CHECK_FALSE(report.at("low_confidence").get<bool>());
  CHECK(report.at("theory_exponent").is_null());

  // the compare pipeline joins the theory column
  ExperimentConfig cmp = cfg;
  cmp.experiment = "fit-compare";
  cmp.model.family = "inverse-square-model";
  cmp.model.a = 0.7;
  cmp.propagator = "sinc";
  cmp.output_dir = fresh_dir("fit-cmp");
  run_experiment(cmp);
  const auto rows =
      lines_of(slurp(fs::path(cmp.output_dir) / "fit_compare.csv"));
  REQUIRE(rows.size() == 2);
  const auto head = split_csv(rows[0]);
  const auto cells = split_csv(rows[1]);
  REQUIRE(head.size() == cells.size());
  CHECK(head[0] == "station");
  double alpha = 0.0, theory = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (head[i] == "alpha_hat") alpha = std::strtod(cells[i].c_str(), nullptr);
    if (head[i] == "theory_exponent")
      theory = std::strtod(cells[i].c_str(), nullptr);
  }
  CHECK(alpha == doctest::Approx(2.4).epsilon(1e-9));
  CHECK(theory == doctest::Approx(2.4).epsilon(1e-12));

  // asking for a station the table does not contain is a config error
  ExperimentConfig missing = cfg;
  missing.fit.station = 7.0;
  CHECK_THROWS_AS(run_experiment(missing), ValidationError);
}

TEST_CASE("price law runs end to end") {
  ExperimentConfig cfg;
  cfg.experiment = "price-law";
  cfg.model.family = "regge-wheeler";
  cfg.model.mass = 1.0;
  cfg.model.ell = 0;
  cfg.model.sigma = 1;
  cfg.propagator = "sinc";
  cfg.data.profile = "gaussian";
  cfg.fit.station = 10.0;
  cfg.fit.window_lo = 100.0;
  cfg.fit.window_hi = 240.0;
  cfg.fd.half_width = 280.0;
  cfg.fd.step = 0.1;
  cfg.fd.final_time = 250.0;
  cfg.output_dir = fresh_dir("price");

  const RunManifest m = run_experiment(cfg);
  REQUIRE(m.artifacts.size() >= 2);  // station series + decay report

  const auto report = nlohmann::json::parse(slurp(fs::path(cfg.output_dir) / "fit.json"));
  const double alpha = report.at("alpha_hat").get<double>();
  CHECK(alpha == doctest::Approx(3.0).epsilon(0.15));
  CHECK(report.at("envelope_points").get<int>() >= 8);
  CHECK(report.at("t_lo").get<double>() == 100.0);
  CHECK(report.at("theory_exponent").get<double>() == 2.0);
  CHECK(report.at("theory_source").get<std::string>().size() > 0);
}

TEST_CASE("the binary maps error classes onto exit codes") {
  // run from the build directory where ctest starts the suite
  REQUIRE(fs::exists("wavelab"));
  const std::string out = fresh_dir("cli");
  const int ok = std::system(
      ("./wavelab potential dump --model peak --strength 2 --x-min -1 "
       "--x-max 1 --count 5 --output " +
       out + " > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(ok) == 0);
  const int bad = std::system(
      "./wavelab scatter sweep --model ism --a 0.1 --lambda-min 0.5 "
      "--lambda-max 2 --count 4 --output /tmp > /dev/null 2>&1");
  CHECK(WEXITSTATUS(bad) == 2);  // a = 0.1 fails model validation
}

}  // TEST_SUITE
