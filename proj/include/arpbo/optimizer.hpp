#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arpbo/arp.hpp"
#include "arpbo/bandit.hpp"
#include "arpbo/gp.hpp"
#include "arpbo/space.hpp"
#include "arpbo/trust_region.hpp"

namespace arpbo {

struct FeatureFlags {
  bool arp = true;
  bool mixture_kernel = true;
  bool bandit = true;
};

struct OptimizerConfig {
  int batch_size = 8;
  int max_iterations = 16;
  std::optional<int> init_points;  // max(batch, min(2 (D + 1), 3 batch))
  std::uint64_t seed = 0;
  TrustRegionConfig turbo;
  ArpConfig arp;
  BanditConfig bandit;
  SurrogateConfig surrogate;
  FeatureFlags flags;

  /// All keys optional; unknown keys are rejected with ConfigError.
  static OptimizerConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  /// Plain single-region TuRBO with a Matern kernel: every feature flag off.
  static OptimizerConfig baseline();
};

/// One evaluated configuration.
struct Observation {
  Point point;
  WarpedVector warped;
  double value = 0.0;      // +inf when the objective returned NaN/inf
  bool imputed = false;
  int iteration = 0;
  ArmSelection arms;
  bool new_best = false;
};

/// Counters for checking which pipeline stages ran.
struct Instrumentation {
  int gp_fits = 0;
  int arp_runs = 0;
  int arp_restarts = 0;
  int bandit_selections = 0;
  int restarts = 0;
};

/// Ask/tell interface shared by the optimizer and the random-search baseline.
class AskTell {
 public:
  virtual ~AskTell() = default;
  virtual std::vector<Point> suggest() = 0;
  virtual void observe(const std::vector<Point>& points, const std::vector<double>& values) = 0;
  virtual std::pair<Point, double> best() const = 0;
};

/// Batch trust-region Bayesian optimizer with adaptive region partitioning,
/// a mixed-variable kernel and per-variable bandits. Suggest and observe must
/// strictly alternate.
class Optimizer : public AskTell {
 public:
  Optimizer(SearchSpace space, const OptimizerConfig& config);

  std::vector<Point> suggest() override;
  void observe(const std::vector<Point>& points, const std::vector<double>& values) override;
  std::pair<Point, double> best() const override;

  const SearchSpace& space() const { return space_; }
  const OptimizerConfig& config() const { return config_; }
  int init_points() const { return init_points_; }
  const std::vector<Observation>& history() const { return history_; }
  const TrustRegionState& trust_region() const { return region_; }
  const BanditState& bandit() const { return bandit_; }
  const Instrumentation& instrumentation() const { return counters_; }
  bool has_pending() const { return pending_.has_value(); }
  int iteration() const { return iteration_; }
  int warnings() const { return warnings_; }

 private:
  enum class Phase { Initial, Restart, Local };
  struct Pending {
    Phase phase;
    std::vector<Point> points;
    std::vector<WarpedVector> warped;
    std::vector<ArmSelection> arms;
  };

  std::vector<Point> suggest_local();
  void restart();
  Matrix history_matrix() const;
  Vector model_targets() const;
  std::optional<RegionClassifier> train_classifier();
  std::vector<Point> take_design(Phase phase, std::vector<Point> design);

  SearchSpace space_;
  OptimizerConfig config_;
  int init_points_ = 0;
  Rng rng_;
  std::vector<Point> init_design_;
  std::vector<Point> restart_design_;
  bool restart_pending_ = false;
  std::vector<Observation> history_;
  std::optional<Pending> pending_;
  TrustRegionState region_;
  BanditState bandit_;
  Instrumentation counters_;
  int iteration_ = 0;
  int warnings_ = 0;
};

/// Uniform random search over the space; the normalization reference.
class RandomSearch : public AskTell {
 public:
  RandomSearch(SearchSpace space, int batch_size, std::uint64_t seed);

  std::vector<Point> suggest() override;
  void observe(const std::vector<Point>& points, const std::vector<double>& values) override;
  std::pair<Point, double> best() const override;

 private:
  SearchSpace space_;
  int batch_size_;
  Rng rng_;
  std::optional<std::vector<Point>> pending_;
  std::optional<std::pair<Point, double>> best_;
};

}  // namespace arpbo
