#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arpbo/optimizer.hpp"
#include "arpbo/space.hpp"

namespace arpbo {

/// Synthetic test function with a known minimum.
struct Objective {
  std::string name;
  SearchSpace space;
  std::function<double(const Point&)> clean;  // noise-free value
  double known_optimum = 0.0;
  Point optimum;  // a point attaining known_optimum
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;

  /// clean(p) plus Gaussian noise that depends only on p and noise_seed.
  double evaluate(const Point& p) const;
};

/// The five suite functions, noise-free, in a fixed order.
std::vector<Objective> builtin_suite(double noise_std = 0.0);

/// Every builtin: the suite plus "-noisy" variants with noise_std 0.01.
std::vector<Objective> builtin_objectives();

/// Throws InputError naming the objective when it does not exist.
Objective find_objective(const std::string& name);

/// What to run in a study: the ask/tell optimizer or uniform random search.
struct OptimizerSpec {
  std::string name;
  bool random_search = false;
  OptimizerConfig config;
};

OptimizerSpec random_search_spec(const OptimizerConfig& budget = {});

struct StudyTrace {
  std::string objective;
  std::string optimizer;
  std::uint64_t seed = 0;
  std::vector<double> best_so_far;  // one per iteration
  std::vector<double> wall_s;       // cumulative seconds at the end of each iteration
  bool failed = false;
  std::string error;

  double final_best() const { return best_so_far.back(); }
};

/// One trace per seed. A throwing objective marks that seed's trace failed;
/// the remaining seeds still run.
std::vector<StudyTrace> run_study(const OptimizerSpec& spec, const Objective& objective,
                                  const std::vector<std::uint64_t>& seeds);

/// 100 (1 - (mean final best - optimum) / (mean random final best - optimum)),
/// clipped below at -100. Failed traces are skipped. Throws
/// UndefinedScoreError when the random reference already sits at the optimum.
double normalized_score(const std::vector<StudyTrace>& traces, const Objective& objective,
                        const std::vector<StudyTrace>& random_traces);

/// (ours - base) / base, or nullopt when base is zero.
std::optional<double> relative_improvement(double ours, double base);

/// The four cumulative arms: Baseline, +Tuning, +ARP, +Mixture Kernel & Bandit.
std::vector<OptimizerSpec> ablation_arms(const OptimizerConfig& budget = {});

/// Looks up "baseline", "tuning", "arp", "full" or "random".
OptimizerSpec arm_by_key(const std::string& key, const OptimizerConfig& budget = {});

struct ArmReport {
  std::string name;
  std::vector<std::optional<double>> scores;  // per objective; nullopt when undefined
  double aggregate = 0.0;                     // mean of the defined scores
};

struct AblationReport {
  std::vector<std::string> objectives;
  std::vector<std::uint64_t> seeds;
  std::vector<ArmReport> arms;  // in run order; random search last
  std::vector<StudyTrace> traces;
  int failed_traces = 0;

  const ArmReport& arm(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Runs every arm and the random reference on every objective with the same
/// seed list, and scores each arm against the reference.
AblationReport run_ablation(const std::vector<OptimizerSpec>& arms, const std::vector<Objective>& objectives,
                            const std::vector<std::uint64_t>& seeds);

/// Header plus one row per (trace, iteration). With wall_clock off the
/// wall_s column is written as 0 so repeated runs compare byte for byte.
void write_traces_csv(std::ostream& out, const std::vector<StudyTrace>& traces, bool wall_clock = true);

}  // namespace arpbo
