#include "arpbo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "arpbo/errors.hpp"
#include "arpbo/sobol.hpp"

namespace arpbo {

namespace {

constexpr int kRestartPool = 100;

double batch_minimum(const std::vector<double>& v, std::size_t& arg) {
  arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < best) {
      best = v[i];
      arg = i;
    }
  return best;
}

}  // namespace

OptimizerConfig OptimizerConfig::baseline() {
  OptimizerConfig c;
  c.flags = {false, false, false};
  return c;
}

Optimizer::Optimizer(SearchSpace space, const OptimizerConfig& config)
    : space_(std::move(space)), config_(config), rng_(config.seed) {
  const int d = space_.dimension();
  if (d > kSobolMaxDimension) throw ConfigError("search spaces above 64 dimensions are not supported");
  if (config_.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config_.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  init_points_ = config_.init_points.value_or(
      std::max(config_.batch_size, std::min(2 * (d + 1), 3 * config_.batch_size)));
  if (init_points_ < config_.batch_size) throw ConfigError("init_points must be >= batch_size");
  config_.init_points = init_points_;
  config_.turbo = config_.turbo.resolve(d, config_.batch_size);
  config_.arp = config_.arp.resolve(d);
  config_.surrogate.kernel.kind = config_.flags.mixture_kernel ? KernelKind::Mixture : KernelKind::Matern;
  config_.surrogate.check();

  const int batches = (init_points_ + config_.batch_size - 1) / config_.batch_size;
  const Matrix design = sobol_points(batches * config_.batch_size, d, rng_());
  for (Eigen::Index r = 0; r < design.rows(); ++r)
    init_design_.push_back(from_unit_cube(space_, design.row(r).transpose()));
  std::reverse(init_design_.begin(), init_design_.end());  // consumed from the back

  bandit_ = BanditState::for_space(space_);
}

std::vector<Point> Optimizer::take_design(Phase phase, std::vector<Point> design) {
  Pending p{phase, std::move(design), {}, {}};
  for (const auto& pt : p.points) {
    p.warped.push_back(warp(space_, pt));
    p.arms.push_back(arms_of(p.warped.back(), bandit_, space_));
  }
  pending_ = std::move(p);
  return pending_->points;
}

std::vector<Point> Optimizer::suggest() {
  if (pending_) throw ProtocolError("suggest called twice without observe");
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  if (restart_pending_) {
    restart_pending_ = false;
    auto design = std::move(restart_design_);
    restart_design_.clear();
    return take_design(Phase::Restart, std::move(design));
  }
  if (static_cast<int>(history_.size()) < init_points_ && !init_design_.empty()) {
    std::vector<Point> design;
    while (design.size() < batch && !init_design_.empty()) {
      design.push_back(std::move(init_design_.back()));
      init_design_.pop_back();
    }
    while (design.size() < batch) design.push_back(random_point(space_, rng_));
    return take_design(Phase::Initial, std::move(design));
  }
  return suggest_local();
}

Matrix Optimizer::history_matrix() const {
  Matrix x(static_cast<Eigen::Index>(history_.size()), space_.dimension());
  for (std::size_t i = 0; i < history_.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = history_[i].warped.transpose();
  return x;
}

Vector Optimizer::model_targets() const {
  // Non-finite observations are modeled as the worst finite value seen.
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& o : history_)
    if (std::isfinite(o.value)) worst = std::max(worst, o.value);
  if (!std::isfinite(worst)) worst = 0.0;
  Vector y(static_cast<Eigen::Index>(history_.size()));
  for (std::size_t i = 0; i < history_.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = std::isfinite(history_[i].value) ? history_[i].value : worst;
  return y;
}

std::optional<RegionClassifier> Optimizer::train_classifier() {
  if (!config_.flags.arp) return std::nullopt;
  if (static_cast<int>(history_.size()) < *config_.arp.activation_threshold) return std::nullopt;
  try {
    const auto labels = label_observations(model_targets());
    ++counters_.arp_runs;
    return fit_classifier(history_matrix(), labels, config_.arp);
  } catch (const DegenerateError&) {
    return std::nullopt;
  } catch (const InvalidLabelsError&) {
    return std::nullopt;
  }
}

std::vector<Point> Optimizer::suggest_local() {
  const int batch = config_.batch_size;
  const Matrix x = history_matrix();
  const GpModel model = gp_fit(space_, x, model_targets(), config_.surrogate, rng_);
  ++counters_.gp_fits;

  Matrix candidates = generate_candidates(region_, full_lengthscales(model), rng_, config_.turbo);
  for (Eigen::Index r = 0; r < candidates.rows(); ++r)
    candidates.row(r) = snap(space_, candidates.row(r).transpose()).transpose();

  std::vector<Eigen::Index> survivors(static_cast<std::size_t>(candidates.rows()));
  std::iota(survivors.begin(), survivors.end(), 0);
  if (auto classifier = train_classifier()) {
    const auto best_warped = history_[static_cast<std::size_t>(std::min_element(history_.begin(), history_.end(),
                                                                               [](const auto& a, const auto& b) {
                                                                                 return a.value < b.value;
                                                                               }) -
                                                              history_.begin())]
                                 .warped;
    survivors = select_candidates(*classifier, candidates, best_warped, config_.arp.fallback_fraction);
    if (static_cast<int>(survivors.size()) < batch) {
      // Pad with the remaining candidates in order.
      std::vector<bool> used(static_cast<std::size_t>(candidates.rows()), false);
      for (auto i : survivors) used[static_cast<std::size_t>(i)] = true;
      for (Eigen::Index i = 0; i < candidates.rows() && static_cast<int>(survivors.size()) < batch; ++i)
        if (!used[static_cast<std::size_t>(i)]) survivors.push_back(i);
    }
  }
  Matrix pool(static_cast<Eigen::Index>(survivors.size()), candidates.cols());
  for (std::size_t r = 0; r < survivors.size(); ++r) pool.row(static_cast<Eigen::Index>(r)) = candidates.row(survivors[r]);

  // One joint posterior draw per slot; each slot takes its draw's minimizer,
  // moving to the next-best row when that row was already taken.
  const Matrix draws = gp_sample(model, pool, rng_, batch);
  std::vector<Eigen::Index> chosen;
  for (int slot = 0; slot < batch; ++slot) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pool.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return draws(a, slot) < draws(b, slot); });
    Eigen::Index pick = order.front();
    for (auto idx : order) {
      const bool taken = std::any_of(chosen.begin(), chosen.end(), [&](auto c) {
        return (pool.row(c) - pool.row(idx)).cwiseAbs().maxCoeff() == 0.0;
      });
      if (!taken) {
        pick = idx;
        break;
      }
    }
    chosen.push_back(pick);
  }

  Pending p{Phase::Local, {}, {}, {}};
  for (auto idx : chosen) {
    Vector w = pool.row(idx).transpose();
    ArmSelection arms;
    if (config_.flags.bandit && !bandit_.empty()) {
      arms = ts_select(bandit_, rng_);
      overwrite_qualitative(w, arms, bandit_, space_);
      ++counters_.bandit_selections;
    } else {
      arms = arms_of(w, bandit_, space_);
    }
    Point pt = unwarp(space_, w);
    p.warped.push_back(warp(space_, pt));
    p.points.push_back(std::move(pt));
    p.arms.push_back(std::move(arms));
  }
  pending_ = std::move(p);
  return pending_->points;
}

void Optimizer::observe(const std::vector<Point>& points, const std::vector<double>& values) {
  if (!pending_) throw ProtocolError("observe called without a pending suggestion; expected suggest");
  if (points.size() != pending_->points.size())
    throw ProtocolError("observe expected " + std::to_string(pending_->points.size()) + " points, got " +
                        std::to_string(points.size()));
  if (values.size() != points.size()) throw ProtocolError("observe needs one value per point");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i] != pending_->points[i]) throw ProtocolError("observed points do not match the pending suggestion");

  Pending batch = std::move(*pending_);
  pending_.reset();

  const double prior_best = history_.empty() ? std::numeric_limits<double>::infinity() : best().second;
  std::vector<double> recorded(values.size());
  std::vector<bool> new_best(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool bad = !std::isfinite(values[i]);
    recorded[i] = bad ? std::numeric_limits<double>::infinity() : values[i];
    if (bad) ++warnings_;
    new_best[i] = recorded[i] < prior_best;
    history_.push_back({batch.points[i], batch.warped[i], recorded[i], bad, iteration_, batch.arms[i], new_best[i]});
  }
  ++iteration_;

  if (config_.flags.bandit && !bandit_.empty()) bandit_ = update_rewards(std::move(bandit_), batch.arms, new_best, config_.bandit);

  std::size_t arg = 0;
  const double batch_best = batch_minimum(recorded, arg);
  switch (batch.phase) {
    case Phase::Initial:
      if (static_cast<int>(history_.size()) >= init_points_) {
        const auto [pt, value] = best();
        region_ = TrustRegionState::fresh(warp(space_, pt), value, config_.turbo);
      }
      break;
    case Phase::Restart: {
      const int restarts = region_.restarts;
      region_ = TrustRegionState::fresh(batch.warped[arg], batch_best, config_.turbo);
      region_.restarts = restarts;
      break;
    }
    case Phase::Local:
      region_ = update_region(std::move(region_), batch_best, batch.warped[arg], config_.turbo);
      if (needs_restart(region_, config_.turbo)) restart();
      break;
  }
}

void Optimizer::restart() {
  const int restarts = region_.restarts + 1;
  ++counters_.restarts;
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  std::vector<Point> design;
  if (auto classifier = train_classifier()) {
    // Restart inside the good region: rank a pool of accepted samples by the
    // surrogate mean and evaluate the most promising ones.
    ++counters_.arp_restarts;
    auto pool = restart_samples(*classifier, space_, rng_, kRestartPool, config_.arp);
    const GpModel model = gp_fit(space_, history_matrix(), model_targets(), config_.surrogate, rng_);
    ++counters_.gp_fits;
    Matrix w(static_cast<Eigen::Index>(pool.size()), space_.dimension());
    for (std::size_t i = 0; i < pool.size(); ++i) w.row(static_cast<Eigen::Index>(i)) = warp(space_, pool[i]).transpose();
    const Vector mean = gp_posterior_mean(model, w);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mean(static_cast<Eigen::Index>(a)) < mean(static_cast<Eigen::Index>(b)); });
    for (auto i : order) {
      if (design.size() == batch) break;
      if (std::find(design.begin(), design.end(), pool[i]) == design.end()) design.push_back(pool[i]);
    }
  }
  while (design.size() < batch) design.push_back(random_point(space_, rng_));
  region_ = TrustRegionState::fresh(warp(space_, design.front()), std::numeric_limits<double>::infinity(),
                                    config_.turbo);
  region_.restarts = restarts;
  restart_design_ = std::move(design);
  restart_pending_ = true;
}

std::pair<Point, double> Optimizer::best() const {
  if (history_.empty()) throw EmptyHistoryError("no observations yet");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < history_.size(); ++i)
    if (history_[i].value < history_[arg].value) arg = i;
  return {history_[arg].point, history_[arg].value};
}

RandomSearch::RandomSearch(SearchSpace space, int batch_size, std::uint64_t seed)
    : space_(std::move(space)), batch_size_(batch_size), rng_(seed) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

std::vector<Point> RandomSearch::suggest() {
  if (pending_) throw ProtocolError("suggest called twice without observe");
  std::vector<Point> out;
  for (int i = 0; i < batch_size_; ++i) out.push_back(random_point(space_, rng_));
  pending_ = out;
  return out;
}

void RandomSearch::observe(const std::vector<Point>& points, const std::vector<double>& values) {
  if (!pending_) throw ProtocolError("observe called without a pending suggestion; expected suggest");
  if (points != *pending_ || values.size() != points.size())
    throw ProtocolError("observed points do not match the pending suggestion");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = std::isfinite(values[i]) ? values[i] : std::numeric_limits<double>::infinity();
    if (!best_ || v < best_->second) best_ = {points[i], v};
  }
  pending_.reset();
}

std::pair<Point, double> RandomSearch::best() const {
  if (!best_) throw EmptyHistoryError("no observations yet");
  return *best_;
}

}  // namespace arpbo
