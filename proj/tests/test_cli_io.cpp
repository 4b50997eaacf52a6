#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "strip_psg/cli_io.hpp"

using namespace strip_psg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("strip_psg_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("numbers round-trip and never print -0") {
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456.789, 1e300}) CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("time resolution") {
  RunConfig cfg;
  auto t = resolve_times(cfg, 2.5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == doctest::Approx(0.5));
  CHECK(t.back() == 2.5);
  cfg.t_range = {{0.5, 1.5}};
  cfg.t_count = 3;
  CHECK(resolve_times(cfg, 2.5) == std::vector<double>{0.5, 1.0, 1.5});
  cfg.times = {0.1, 0.2};
  CHECK(resolve_times(cfg, 2.5) == cfg.times);
  cfg.times = {0.0};
  CHECK_THROWS_AS(resolve_times(cfg, 2.5), std::invalid_argument);
  cfg.times = {3.0};
  CHECK_THROWS_AS(resolve_times(cfg, 2.5), std::invalid_argument);
}

TEST_CASE("family overrides only for s1 and s2") {
  RunConfig cfg;
  cfg.a = -1.0;
  CHECK(load_scenario(cfg).u0(0.5) == -1.0);
  cfg.scenario = "s3";
  CHECK_THROWS_AS(load_scenario(cfg), std::invalid_argument);
}

TEST_CASE("fields output is deterministic and well formed") {
  RunConfig cfg;
  cfg.command = "fields";
  cfg.scenario = "s3";
  cfg.times = {0.3, 0.9};
  cfg.nx = 50;
  cfg.out_dir = scratch("fields_a").string();
  auto a = run(cfg);
  cfg.out_dir = scratch("fields_b").string();
  auto b = run(cfg);
  REQUIRE(a.files.size() == 2);
  auto fa = slurp(fs::path(a.files[0])), fb = slurp(fs::path(b.files[0]));
  CHECK(fa == fb);
  CHECK(slurp(fs::path(a.files[1])) == slurp(fs::path(b.files[1])));
  auto rows = lines(fa);
  CHECK(rows.front() == "x,t,u,m,regime,mu");
  CHECK(rows.size() == 1 + 2 * 51);
  CHECK(fa.find("-0,") == std::string::npos);
  CHECK(fa.find("nan") == std::string::npos);
}

TEST_CASE("curves include traces") {
  RunConfig cfg;
  cfg.command = "curves";
  cfg.scenario = "s1";
  cfg.nt = 20;
  cfg.nx = 100;
  cfg.traces = {{0.2, 0.1}};
  cfg.out_dir = scratch("curves").string();
  auto r = run(cfg);
  auto rows = lines(slurp(fs::path(r.files[0])));
  CHECK(rows.front() == "curve_id,t,x");
  CHECK(rows.size() > 20);
  cfg.traces = {{1.5, 0.1}};
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("examples reproduce their closed forms") {
  RunConfig cfg;
  cfg.command = "examples";
  cfg.nx = 100;
  cfg.nt = 20;
  cfg.out_dir = scratch("examples").string();
  auto r = run(cfg);
  CHECK(r.ok);
  auto rows = lines(slurp(fs::path(cfg.out_dir) / "examples.csv"));
  CHECK(rows.size() == 1 + 4 + 2 + 4 + 3);
  for (const char* sub : {"s1", "s2", "s3", "s4"}) CHECK(fs::exists(fs::path(cfg.out_dir) / sub / "fields.csv"));
}

TEST_CASE("verify flags an invalid scenario") {
  auto dir = scratch("verify_bad");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"name": "corrupt", "t_max": 2.5,
      "rho0": {"breakpoints": [], "values": [1.0]}, "u0": {"breakpoints": [], "values": [-2.0]},
      "rho_bl": {"breakpoints": [], "values": [1.0]}, "u_bl": {"breakpoints": [], "values": [3.0]},
      "rho_br": {"breakpoints": [], "values": [1.0]}, "u_br": {"breakpoints": [], "values": [0.5]}})";
  }
  RunConfig cfg;
  cfg.command = "verify";
  cfg.scenario = (dir / "bad.json").string();
  cfg.out_dir = dir.string();
  auto r = run(cfg);
  CHECK_FALSE(r.ok);
  auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
  CHECK(j["pass"] == false);
  CHECK(j["checks"][0]["name"] == "validation");
  cfg.command = "fields";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.command = "nope";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("verify passes a single cheap check on s4") {
  RunConfig cfg;
  cfg.command = "verify";
  cfg.scenario = "s4";
  cfg.checks = "boundary";
  cfg.out_dir = scratch("verify_s4").string();
  auto r = run(cfg);
  CHECK(r.ok);
  auto j = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "verify.json"));
  CHECK(j["pass"] == true);
  cfg.checks = "everything";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}
