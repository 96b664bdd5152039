#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "arpbo/errors.hpp"
#include "arpbo/optimizer.hpp"

namespace arpbo {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

OptimizerConfig OptimizerConfig::from_json(const json& doc) {
  OptimizerConfig c;
  try {
    reject_unknown(doc, "config",
                   {"batch_size", "max_iterations", "init_points", "seed", "turbo", "arp", "bandit", "surrogate", "flags"});
    read(doc, "batch_size", c.batch_size);
    read(doc, "max_iterations", c.max_iterations);
    read(doc, "init_points", c.init_points);
    read(doc, "seed", c.seed);
    if (doc.contains("turbo")) {
      const auto& t = doc["turbo"];
      reject_unknown(t, "turbo",
                     {"length_init", "length_max", "length_min", "success_tolerance", "failure_tolerance",
                      "n_candidates", "perturbation_prob", "improvement_margin"});
      read(t, "length_init", c.turbo.length_init);
      read(t, "length_max", c.turbo.length_max);
      read(t, "length_min", c.turbo.length_min);
      read(t, "success_tolerance", c.turbo.success_tolerance);
      read(t, "failure_tolerance", c.turbo.failure_tolerance);
      read(t, "n_candidates", c.turbo.n_candidates);
      read(t, "perturbation_prob", c.turbo.perturbation_prob);
      read(t, "improvement_margin", c.turbo.improvement_margin);
    }
    if (doc.contains("arp")) {
      const auto& a = doc["arp"];
      reject_unknown(a, "arp",
                     {"activation_threshold", "svm_budget", "svm_c", "fallback_fraction", "restart_attempt_factor"});
      read(a, "activation_threshold", c.arp.activation_threshold);
      read(a, "svm_budget", c.arp.svm_budget);
      read(a, "svm_c", c.arp.svm_c);
      read(a, "fallback_fraction", c.arp.fallback_fraction);
      read(a, "restart_attempt_factor", c.arp.restart_attempt_factor);
    }
    if (doc.contains("bandit")) {
      reject_unknown(doc["bandit"], "bandit", {"beta_update"});
      read(doc["bandit"], "beta_update", c.bandit.beta_update);
    }
    if (doc.contains("surrogate")) {
      const auto& s = doc["surrogate"];
      reject_unknown(s, "surrogate",
                     {"lengthscale_lo", "lengthscale_hi", "signal_variance_lo", "signal_variance_hi",
                      "noise_variance_lo", "noise_variance_hi", "lambda_grid", "default_lambda",
                      "default_lengthscale", "starts", "sweeps", "golden_iterations", "max_evaluations",
                      "indicator", "linear_on_raw"});
      auto& g = c.surrogate;
      read(s, "lengthscale_lo", g.lengthscale_lo);
      read(s, "lengthscale_hi", g.lengthscale_hi);
      read(s, "signal_variance_lo", g.signal_variance_lo);
      read(s, "signal_variance_hi", g.signal_variance_hi);
      read(s, "noise_variance_lo", g.noise_variance_lo);
      read(s, "noise_variance_hi", g.noise_variance_hi);
      read(s, "lambda_grid", g.lambda_grid);
      read(s, "default_lambda", g.default_lambda);
      read(s, "default_lengthscale", g.default_lengthscale);
      read(s, "starts", g.starts);
      read(s, "sweeps", g.sweeps);
      read(s, "golden_iterations", g.golden_iterations);
      read(s, "max_evaluations", g.max_evaluations);
      read(s, "linear_on_raw", g.kernel.linear_on_raw);
      if (s.contains("indicator")) {
        const auto mode = s["indicator"].get<std::string>();
        if (mode == "overlap") {
          g.kernel.indicator = IndicatorMode::Overlap;
        } else if (mode == "strict") {
          g.kernel.indicator = IndicatorMode::Strict;
        } else {
          throw ConfigError("surrogate: indicator must be \"overlap\" or \"strict\"");
        }
      }
    }
    if (doc.contains("flags")) {
      const auto& f = doc["flags"];
      reject_unknown(f, "flags", {"arp", "mixture_kernel", "bandit"});
      read(f, "arp", c.flags.arp);
      read(f, "mixture_kernel", c.flags.mixture_kernel);
      read(f, "bandit", c.flags.bandit);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed optimizer config: ") + e.what());
  }
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (c.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  return c;
}

json OptimizerConfig::to_json() const {
  const auto& g = surrogate;
  return {
      {"batch_size", batch_size},
      {"max_iterations", max_iterations},
      {"init_points", optional_json(init_points)},
      {"seed", seed},
      {"turbo",
       {{"length_init", turbo.length_init},
        {"length_max", turbo.length_max},
        {"length_min", turbo.length_min},
        {"success_tolerance", turbo.success_tolerance},
        {"failure_tolerance", optional_json(turbo.failure_tolerance)},
        {"n_candidates", optional_json(turbo.n_candidates)},
        {"perturbation_prob", optional_json(turbo.perturbation_prob)},
        {"improvement_margin", turbo.improvement_margin}}},
      {"arp",
       {{"activation_threshold", optional_json(arp.activation_threshold)},
        {"svm_budget", arp.svm_budget},
        {"svm_c", arp.svm_c},
        {"fallback_fraction", arp.fallback_fraction},
        {"restart_attempt_factor", arp.restart_attempt_factor}}},
      {"bandit", {{"beta_update", bandit.beta_update}}},
      {"surrogate",
       {{"lengthscale_lo", g.lengthscale_lo},
        {"lengthscale_hi", g.lengthscale_hi},
        {"signal_variance_lo", g.signal_variance_lo},
        {"signal_variance_hi", g.signal_variance_hi},
        {"noise_variance_lo", g.noise_variance_lo},
        {"noise_variance_hi", g.noise_variance_hi},
        {"lambda_grid", g.lambda_grid},
        {"default_lambda", g.default_lambda},
        {"default_lengthscale", g.default_lengthscale},
        {"starts", g.starts},
        {"sweeps", g.sweeps},
        {"golden_iterations", g.golden_iterations},
        {"max_evaluations", g.max_evaluations},
        {"indicator", g.kernel.indicator == IndicatorMode::Strict ? "strict" : "overlap"},
        {"linear_on_raw", g.kernel.linear_on_raw}}},
      {"flags", {{"arp", flags.arp}, {"mixture_kernel", flags.mixture_kernel}, {"bandit", flags.bandit}}},
  };
}

}  // namespace arpbo
