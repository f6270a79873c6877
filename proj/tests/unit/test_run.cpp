#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "fksusc/errors.hpp"
#include "fksusc/record_io.hpp"
#include "fksusc/run.hpp"

using namespace fksusc;
using nlohmann::json;

namespace {

RunConfig config(const char* text) { return parse_config_text(text); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fksusc_test_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("free atomic point") {
  const RunRecord r = run(config(R"({"beta": 1, "mu": 0, "U": 0, "w1": 0, "bath": "atomic", "ell": [1], "n_cut": 64})"));
  REQUIRE(r.points.size() == 1);
  CHECK(r.exit_code() == exit_code::success);
  const SusceptibilityResult& s = r.points[0].susceptibilities.at(0);
  REQUIRE(s.ok());
  // the full-axis sum vanishes, so the truncated value is exactly minus the tail
  CHECK(std::abs(*s.value(Route::closed)) == doctest::Approx(s.tail_estimate).epsilon(1e-12));
  CHECK(s.max_deviation <= 1e-12);
  CHECK_FALSE(r.points[0].dmft.has_value());
  CHECK(r.points[0].oracle.empty());
}

TEST_CASE("interacting point with DMFT bath and oracle") {
  const RunRecord r = run(config(R"({"beta": 3, "mu": 0.5, "U": 1, "w1": 0.5,
      "bath": {"kind": "dmft_bethe", "t_star": 1}, "ell": [1, -2], "n_cut": 64,
      "oracle": {"enabled": true}})"));
  CHECK(r.exit_code() == exit_code::success);
  const PointRecord& p = r.points.at(0);
  REQUIRE(p.dmft.has_value());
  CHECK(p.dmft->iterations == static_cast<int>(p.dmft->residuals.size()));
  CHECK(p.dmft->residuals.back() <= 1e-10);
  CHECK(p.susceptibilities.size() == 2);
  CHECK(p.oracle.size() == 2);
  for (const OracleReport& o : p.oracle) CHECK(o.passed);
}

TEST_CASE("structured record round trip and determinism") {
  const RunConfig c = config(R"({"beta": 4, "mu": 0.2, "U": 1.3, "w1": 0.3,
      "bath": {"kind": "single_level", "V": 0.6, "eps_b": 0.1}, "ell": [1, 2, -5], "n_cut": 32,
      "oracle": {"enabled": true}})");
  const RunRecord a = run(c);
  const json doc = record_to_json(a);
  CHECK(doc["format"] == "fksusc-record");
  CHECK(doc["version"] == kRecordVersion);
  CHECK(record_to_json(record_from_json(doc)).dump() == doc.dump());
  CHECK(record_to_json(run(c)).dump() == doc.dump());
  const RunRecord back = record_from_json(doc);
  CHECK(*back.points[0].susceptibilities[2].value(Route::bse) == *a.points[0].susceptibilities[2].value(Route::bse));

  std::stringstream csv;
  write_tabular(csv, a);
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# fksusc-tabular v1 columns=", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 3 * 3);

  const auto dir = scratch("emit");
  for (int pass = 0; pass < 2; ++pass) {
    const auto files = emit(run(c), OutputFormat::both, dir, pass == 0 ? "first" : "second");
    CHECK(files.size() == 3);
  }
  CHECK(slurp(dir / "first.json") == slurp(dir / "second.json"));
  CHECK(slurp(dir / "first.csv") == slurp(dir / "second.csv"));
  CHECK(json::parse(slurp(dir / "first.meta.json")).contains("points"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output is an error") {
  const RunRecord r = run(config(R"({"beta": 1, "mu": 0, "U": 0, "w1": 0, "bath": "atomic", "ell": [1], "n_cut": 8})"));
  const auto dir = scratch("blocked");
  std::filesystem::create_directories(dir.parent_path());
  std::ofstream(dir) << "a file, not a directory";
  CHECK_THROWS_AS(emit(r, OutputFormat::tabular, dir / "sub", "x"), Error);
  std::filesystem::remove(dir);
}

TEST_CASE("sweep") {
  RunConfig c = config(R"({"beta": 2, "mu": 0.1, "U": 1, "w1": 0.5, "bath": "atomic", "ell": [1], "n_cut": 16,
      "sweep": {"U": [0.5, 1.0, 1.5], "w1": [0.25, 0.75]}})");
  const std::vector<RunConfig> points = expand_sweep(c);
  REQUIRE(points.size() == 6);
  CHECK(points[0].params.U == 0.5);
  CHECK(points[1].params.w1 == 0.75);
  const RunRecord serial = sweep(c, 1);
  const RunRecord parallel = sweep(c, 2);
  CHECK(serial.mode == "sweep");
  CHECK(serial.points.size() == 6);
  CHECK(record_to_json(serial).dump() == record_to_json(parallel).dump());
}

TEST_CASE("exit codes") {
  SUBCASE("table narrower than the pair window") {
    const auto dir = scratch("table");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "lam.dat") << "# m re im\n0 0 0\n-1 0 0\n";
    RunConfig c = config(R"({"beta": 1, "mu": 0, "U": 1, "w1": 0.5, "bath": "atomic", "ell": [1], "n_cut": 8})");
    c.bath.kind = BathKind::table;
    c.bath.path = dir / "lam.dat";
    const RunRecord r = run(c);
    CHECK(r.exit_code() == exit_code::config_rejected);
    REQUIRE_FALSE(r.points[0].errors.empty());
    CHECK(r.points[0].errors[0].stage == "bath");
    std::filesystem::remove_all(dir);
  }
  SUBCASE("DMFT that does not converge") {
    const RunRecord r = run(config(R"({"beta": 5, "mu": 0.5, "U": 1, "w1": 0.5,
        "bath": {"kind": "dmft_bethe", "t_star": 1, "max_iter": 2}, "ell": [1], "n_cut": 16})"));
    CHECK(r.exit_code() == exit_code::numerical_failure);
  }
  SUBCASE("oracle tolerance failure") {
    const RunRecord r = run(config(R"({"beta": 5, "mu": 0.5, "U": 1, "w1": 0.5, "bath": "atomic",
        "ell": [1], "n_cut": 16, "oracle": {"enabled": true, "tolerance": 1e-30}})"));
    CHECK(r.exit_code() == exit_code::oracle_failure);
  }
}

TEST_CASE("seeded oracle runs") {
  const RunConfig c = config(R"({"beta": 2, "mu": 0.1, "U": 1, "w1": 0.5, "bath": "atomic", "ell": [1], "n_cut": 16})");
  const RunRecord a = run_oracle(c, 17, 3);
  const RunRecord b = run_oracle(c, 17, 3);
  CHECK(a.mode == "oracle");
  CHECK(a.points.size() == 4);
  CHECK(record_to_json(a).dump() == record_to_json(b).dump());
  CHECK(a.exit_code() == exit_code::success);
  for (const PointRecord& p : a.points) {
    CHECK(p.susceptibilities.empty());
    CHECK(p.oracle.size() == 1);
  }
  CHECK(run_oracle(c, std::nullopt, 0).points.size() == 1);
}
