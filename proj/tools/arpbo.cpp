#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arpbo/bench.hpp"
#include "arpbo/errors.hpp"
#include "arpbo/external.hpp"
#include "arpbo/wire.hpp"

using namespace arpbo;
using nlohmann::json;

namespace {

// 0 success, 1 runtime failure, 2 usage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

OptimizerConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return OptimizerConfig::from_json(read_json_file(path));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::uint64_t> seed_list(int count, std::uint64_t first) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<std::uint64_t>(i));
  return seeds;
}

struct BenchArgs {
  std::string suite;
  std::string arm;
  std::string objective;
  std::string config;
  std::string out = "results";
  int seeds = 10;
  std::uint64_t seed = 0;
  bool no_wall_clock = false;
};

int cmd_bench(const BenchArgs& a) {
  const OptimizerConfig budget = load_config(a.config);
  std::vector<Objective> objectives;
  if (!a.objective.empty()) {
    try {
      objectives.push_back(find_objective(a.objective));
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  } else if (a.suite.empty() || a.suite == "builtin") {
    objectives = builtin_suite();
  } else if (a.suite == "builtin-noisy") {
    objectives = builtin_suite(0.01);
  } else {
    throw UsageError("unknown suite '" + a.suite + "' (expected builtin or builtin-noisy)");
  }

  std::vector<OptimizerSpec> arms;
  if (a.arm.empty()) {
    arms = ablation_arms(budget);
  } else {
    try {
      arms.push_back(arm_by_key(a.arm, budget));
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    if (arms.back().random_search) arms.clear();  // the reference runs anyway
  }
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");

  const auto seeds = seed_list(a.seeds, a.seed);
  const auto report = run_ablation(arms, objectives, seeds);

  std::filesystem::create_directories(a.out);
  {
    std::ofstream csv(std::filesystem::path(a.out) / "traces.csv");
    write_traces_csv(csv, report.traces, !a.no_wall_clock);
  }
  {
    std::ofstream js(std::filesystem::path(a.out) / "scores.json");
    js << report.to_json().dump(2) << '\n';
  }

  std::cout << "arm";
  for (const auto& o : report.objectives) std::cout << '\t' << o;
  std::cout << "\taggregate\n";
  for (const auto& arm : report.arms) {
    std::cout << arm.name;
    for (const auto& s : arm.scores) {
      std::cout << '\t';
      if (s) {
        std::cout << std::fixed << std::setprecision(2) << *s;
      } else {
        std::cout << "n/a";
      }
    }
    std::cout << '\t' << std::fixed << std::setprecision(2) << arm.aggregate << '\n';
  }
  if (report.failed_traces > 0) {
    for (const auto& t : report.traces)
      if (t.failed) std::cerr << "study failed: " << t.optimizer << " on " << t.objective << " seed " << t.seed << ": "
                              << t.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_serve() {
  ServeSession session;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (const auto reply = session.handle_line(line)) std::cout << *reply << '\n' << std::flush;
  }
  return 0;
}

struct RunArgs {
  std::string space;
  std::string config;
  std::string cmd;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  SearchSpace space = [&] {
    try {
      return SearchSpace::from_json(read_json_file(a.space));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }();
  OptimizerConfig config = load_config(a.config);
  if (a.seed) config.seed = *a.seed;
  Optimizer opt(space, config);
  int failures = 0;
  for (int it = 0; it < opt.config().max_iterations; ++it) {
    const auto pts = opt.suggest();
    std::vector<double> values;
    for (const auto& p : pts) {
      const auto r = run_external(a.cmd, space.point_to_json(p).dump());
      if (!r.ok) {
        ++failures;
        std::cerr << "warning: " << r.problem << "; value treated as +inf\n";
      }
      values.push_back(r.value);
    }
    opt.observe(pts, values);
  }
  const auto [pt, value] = opt.best();
  const json out = {{"best", space.point_to_json(pt)},
                    {"value", std::isfinite(value) ? json(value) : json(nullptr)},
                    {"evaluations", opt.history().size()},
                    {"warnings", failures}};
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-variable batch Bayesian optimization with trust regions, region partitioning and bandits"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run the ablation or a single arm on builtin objectives");
  b->add_option("--suite", bench.suite, "builtin or builtin-noisy");
  b->add_option("--arm", bench.arm, "baseline, tuning, arp, full or random");
  b->add_option("--objective", bench.objective, "a single builtin objective");
  b->add_option("--config", bench.config, "optimizer config JSON used as the budget");
  b->add_option("--seeds", bench.seeds, "number of paired seeds");
  b->add_option("--seed", bench.seed, "first seed");
  b->add_option("--out", bench.out, "output directory");
  b->add_flag("--no-wall-clock", bench.no_wall_clock, "write 0 in the wall_s column");

  auto* s = app.add_subcommand("serve", "line-delimited JSON protocol on stdin/stdout");

  RunArgs run;
  auto* r = app.add_subcommand("run", "optimize an external program");
  r->add_option("--space", run.space, "search space JSON")->required();
  r->add_option("--config", run.config, "optimizer config JSON");
  r->add_option("--cmd", run.cmd, "shell command reading a point on stdin and printing a value")->required();
  r->add_option("--seed", run.seed, "overrides the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (b->parsed()) return cmd_bench(bench);
    if (s->parsed()) return cmd_serve();
    return cmd_run(run);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
