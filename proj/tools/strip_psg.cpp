#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "strip_psg/cli_io.hpp"

using namespace strip_psg;

namespace {

std::pair<double, double> parse_pair(const std::string& text, char sep, const char* what) {
  auto pos = text.find(sep);
  if (pos == std::string::npos) throw CLI::ValidationError(what, "expected two numbers separated by '" + std::string(1, sep) + "'");
  try {
    return {std::stod(text.substr(0, pos)), std::stod(text.substr(pos + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "not a number: " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pressureless gas on a strip with inflow boundaries"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string t_range, checks = "all";
  std::vector<std::string> traces;
  std::map<std::string, WallRule> wall_rules{{"inert", WallRule::Inert}, {"momentum", WallRule::Momentum}};
  double a = 0, b = 0, btilde = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", cfg.scenario, "s1|s2|s3|s4 or a scenario JSON file")->capture_default_str();
    sub->add_option("--a", a, "initial velocity of the s1/s2 family");
    sub->add_option("--b", b, "right-wall velocity of the s1/s2 family");
    sub->add_option("--btilde", btilde, "left-wall velocity of the s1/s2 family");
    sub->add_option("--t", cfg.times, "times (repeat or comma-separate)")->delimiter(',');
    sub->add_option("--t-range", t_range, "lo:hi");
    sub->add_option("--t-count", cfg.t_count, "samples in the time range")->capture_default_str();
    sub->add_option("--nx", cfg.nx, "space resolution")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--nt", cfg.nt, "time resolution")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for sampled checks and the oracle")->capture_default_str();
    sub->add_option("--tol-weak", cfg.tol.weak)->capture_default_str();
    sub->add_option("--tol-mu", cfg.tol.mu)->capture_default_str();
    sub->add_option("--tol-boundary", cfg.tol.boundary)->capture_default_str();
    sub->add_option("--tol-oracle", cfg.tol.oracle)->capture_default_str();
    sub->add_option("--particles", cfg.particles, "initial particle count")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--wall-rule", cfg.wall, "oracle wall treatment: inert|momentum")
        ->transform(CLI::CheckedTransformer(wall_rules, CLI::ignore_case));
  };

  auto* fields = app.add_subcommand("fields", "u, m, regime and mu on a grid; atoms");
  auto* curves = app.add_subcommand("curves", "shock loci and characteristic traces");
  auto* verify = app.add_subcommand("verify", "run verification checks, write verify.json");
  auto* oracle = app.add_subcommand("oracle", "sticky-particle comparison");
  auto* examples = app.add_subcommand("examples", "reproduce the built-in examples");
  for (auto* sub : {fields, curves, verify, oracle, examples}) common(sub);
  curves->add_option("--trace", traces, "x,t start of a traced curve (repeatable)");
  verify->add_option("checks", checks, "all|entropy|weak|identities|monotonicity|boundary|oracle")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (sub->count("--a")) cfg.a = a;
    if (sub->count("--b")) cfg.b = b;
    if (sub->count("--btilde")) cfg.btilde = btilde;
    if (!t_range.empty()) cfg.t_range = parse_pair(t_range, ':', "--t-range");
    for (const auto& tr : traces) cfg.traces.push_back(parse_pair(tr, ',', "--trace"));
    cfg.checks = checks;
    auto res = run(cfg);
    std::cout << res.summary;
    if (!res.summary.empty() && res.summary.back() != '\n') std::cout << "\n";
    for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
    return res.ok ? 0 : 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
