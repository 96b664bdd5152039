#include "arpbo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "arpbo/errors.hpp"

namespace arpbo {

namespace {

double real_of(const Point& p, const std::string& k) { return std::get<double>(p.at(k)); }
double int_of(const Point& p, const std::string& k) { return static_cast<double>(std::get<std::int64_t>(p.at(k))); }
bool bool_of(const Point& p, const std::string& k) { return std::get<bool>(p.at(k)); }

int category_of(const SearchSpace& s, const Point& p, const std::string& k) {
  for (const auto& spec : s.params())
    if (spec.name == k) {
      const auto& v = std::get<std::string>(p.at(k));
      return static_cast<int>(std::find(spec.categories.begin(), spec.categories.end(), v) - spec.categories.begin());
    }
  throw InputError("no parameter " + k);
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// x in [0,1]^4, y in {0..10}^2, two categoricals.
Objective mixed_sphere() {
  static const double color_pen[] = {1.0, 0.0, 2.0, 0.5};
  static const double shape_pen[] = {0.5, 2.0, 0.0};
  std::vector<ParamSpec> ps;
  for (int i = 1; i <= 4; ++i) ps.push_back(ParamSpec::real("x" + std::to_string(i), 0.0, 1.0));
  ps.push_back(ParamSpec::integer("y1", 0, 10));
  ps.push_back(ParamSpec::integer("y2", 0, 10));
  ps.push_back(ParamSpec::categorical("color", {"red", "green", "blue", "black"}));
  ps.push_back(ParamSpec::categorical("shape", {"circle", "square", "star"}));
  Objective o{"mixed-sphere", SearchSpace(ps), nullptr, 0.0, {}, 0.0, 0};
  const SearchSpace s = o.space;
  o.clean = [s](const Point& p) {
    double v = 0;
    for (int i = 1; i <= 4; ++i) v += std::pow(real_of(p, "x" + std::to_string(i)) - 0.3, 2);
    v += std::pow(int_of(p, "y1") - 3, 2) + std::pow(int_of(p, "y2") - 7, 2);
    return v + color_pen[category_of(s, p, "color")] + shape_pen[category_of(s, p, "shape")];
  };
  o.optimum = {{"x1", 0.3}, {"x2", 0.3}, {"x3", 0.3}, {"x4", 0.3}, {"y1", std::int64_t{3}},
               {"y2", std::int64_t{7}}, {"color", std::string("green")}, {"shape", std::string("star")}};
  return o;
}

Objective mixed_rosenbrock() {
  Objective o{"mixed-rosenbrock",
              SearchSpace({ParamSpec::real("x1", -2.0, 2.0), ParamSpec::real("x2", -2.0, 2.0),
                           ParamSpec::integer("k", 0, 5), ParamSpec::boolean("flip")}),
              nullptr, 0.0, {}, 0.0, 0};
  o.clean = [](const Point& p) {
    const bool flip = bool_of(p, "flip");
    const double s = flip ? -1.0 : 1.0;
    const double x1 = real_of(p, "x1"), x2 = real_of(p, "x2");
    return std::pow(1 - s * x1, 2) + 100 * std::pow(x2 - x1 * x1, 2) + std::pow(int_of(p, "k") - 2, 2) +
           (flip ? 0.0 : 1.0);
  };
  o.optimum = {{"x1", -1.0}, {"x2", 1.0}, {"k", std::int64_t{2}}, {"flip", true}};
  return o;
}

// Deep basin whose center the categorical moves, and a shallow one near the
// origin of the same width. Gap between the basins' minima is 0.4.
Objective two_basin() {
  static const double cx[] = {0.75, 0.65, 0.8};
  static const double cy[] = {0.75, 0.8, 0.65};
  static const double pen[] = {0.0, 0.1, 0.2};
  Objective o{"two-basin",
              SearchSpace({ParamSpec::real("x1", 0.0, 1.0), ParamSpec::real("x2", 0.0, 1.0),
                           ParamSpec::categorical("mode", {"a", "b", "c"})}),
              nullptr, 0.0, {}, 0.0, 0};
  const SearchSpace s = o.space;
  o.clean = [s](const Point& p) {
    const int m = category_of(s, p, "mode");
    const double x1 = real_of(p, "x1"), x2 = real_of(p, "x2");
    const double global = std::exp(-(std::pow(x1 - cx[m], 2) + std::pow(x2 - cy[m], 2)) / (2 * 0.15 * 0.15));
    const double local = 0.6 * std::exp(-(std::pow(x1 - 0.2, 2) + std::pow(x2 - 0.2, 2)) / (2 * 0.15 * 0.15));
    return 1.0 - std::max(global, local) + pen[m];
  };
  o.optimum = {{"x1", 0.75}, {"x2", 0.75}, {"mode", std::string("a")}};
  return o;
}

Objective qual_dominant() {
  static const double pen[] = {0.8, 0.5, 1.0, 0.0, 0.3};
  Objective o{"qual-dominant",
              SearchSpace({ParamSpec::categorical("choice", {"c0", "c1", "c2", "c3", "c4"}),
                           ParamSpec::real("x1", 0.0, 1.0), ParamSpec::real("x2", 0.0, 1.0)}),
              nullptr, 0.0, {}, 0.0, 0};
  const SearchSpace s = o.space;
  o.clean = [s](const Point& p) {
    const double x1 = real_of(p, "x1"), x2 = real_of(p, "x2");
    return 0.8 * pen[category_of(s, p, "choice")] + 0.2 * (std::pow(x1 - 0.6, 2) + std::pow(x2 - 0.2, 2));
  };
  o.optimum = {{"choice", std::string("c3")}, {"x1", 0.6}, {"x2", 0.2}};
  return o;
}

// The best learning rate shrinks as the model gets deeper.
Objective log_scale_tune() {
  Objective o{"log-scale-tune",
              SearchSpace({ParamSpec::real("lr", 1e-4, 1.0, Scale::Log), ParamSpec::integer("depth", 1, 12)}),
              nullptr, 0.0, {}, 0.0, 0};
  o.clean = [](const Point& p) {
    const double d = int_of(p, "depth");
    return std::pow(std::log10(real_of(p, "lr")) + 1 + 0.15 * (d - 1), 2) + 0.02 * std::pow(d - 7, 2);
  };
  o.optimum = {{"lr", std::pow(10.0, -1.9)}, {"depth", std::int64_t{7}}};
  return o;
}

double mean_final(const std::vector<StudyTrace>& traces) {
  double sum = 0;
  int n = 0;
  for (const auto& t : traces)
    if (!t.failed && !t.best_so_far.empty()) {
      sum += t.final_best();
      ++n;
    }
  if (n == 0) throw UndefinedScoreError("no successful traces to score");
  return sum / n;
}

nlohmann::json optional_number(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

double Objective::evaluate(const Point& p) const {
  space.validate(p);
  const double v = clean(p);
  if (noise_std == 0.0) return v;
  Rng rng(fnv1a(space.point_to_json(p).dump(), noise_seed));
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return v + noise_std * std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

std::vector<Objective> builtin_suite(double noise_std) {
  std::vector<Objective> out{mixed_sphere(), mixed_rosenbrock(), two_basin(), qual_dominant(), log_scale_tune()};
  for (auto& o : out) {
    o.noise_std = noise_std;
    if (noise_std > 0) o.name += "-noisy";
  }
  return out;
}

std::vector<Objective> builtin_objectives() {
  auto out = builtin_suite(0.0);
  for (auto& o : builtin_suite(0.01)) out.push_back(std::move(o));
  return out;
}

Objective find_objective(const std::string& name) {
  for (auto& o : builtin_objectives())
    if (o.name == name) return o;
  throw InputError("unknown objective '" + name + "'");
}

OptimizerSpec random_search_spec(const OptimizerConfig& budget) { return {"random", true, budget}; }

std::vector<StudyTrace> run_study(const OptimizerSpec& spec, const Objective& objective,
                                  const std::vector<std::uint64_t>& seeds) {
  using clock = std::chrono::steady_clock;
  std::vector<StudyTrace> out;
  for (const auto seed : seeds) {
    StudyTrace trace{objective.name, spec.name, seed, {}, {}, false, {}};
    const auto start = clock::now();
    try {
      OptimizerConfig cfg = spec.config;
      cfg.seed = seed;
      std::unique_ptr<AskTell> opt;
      if (spec.random_search) {
        opt = std::make_unique<RandomSearch>(objective.space, cfg.batch_size, seed);
      } else {
        opt = std::make_unique<Optimizer>(objective.space, cfg);
      }
      for (int it = 0; it < cfg.max_iterations; ++it) {
        const auto pts = opt->suggest();
        std::vector<double> values;
        values.reserve(pts.size());
        for (const auto& p : pts) values.push_back(objective.evaluate(p));
        opt->observe(pts, values);
        trace.best_so_far.push_back(opt->best().second);
        trace.wall_s.push_back(std::chrono::duration<double>(clock::now() - start).count());
      }
    } catch (const std::exception& e) {
      trace.failed = true;
      trace.error = e.what();
    }
    out.push_back(std::move(trace));
  }
  return out;
}

double normalized_score(const std::vector<StudyTrace>& traces, const Objective& objective,
                        const std::vector<StudyTrace>& random_traces) {
  const double ours = mean_final(traces);
  const double reference = mean_final(random_traces);
  const double gap = reference - objective.known_optimum;
  if (gap == 0.0)
    throw UndefinedScoreError("random search already reaches the optimum of '" + objective.name + "'");
  return std::max(-100.0, 100.0 * (1.0 - (ours - objective.known_optimum) / gap));
}

std::optional<double> relative_improvement(double ours, double base) {
  if (base == 0.0) return std::nullopt;
  return (ours - base) / base;
}

std::vector<OptimizerSpec> ablation_arms(const OptimizerConfig& budget) {
  OptimizerConfig base = budget;
  base.flags = {false, false, false};
  base.turbo.length_min = 0.0078125;  // 2^-7
  OptimizerConfig tuned = base;
  tuned.turbo.length_min = 0.125;  // 2^-3
  OptimizerConfig arp = tuned;
  arp.flags.arp = true;
  OptimizerConfig full = arp;
  full.flags.mixture_kernel = true;
  full.flags.bandit = true;
  return {{"Baseline", false, base}, {"+Tuning", false, tuned}, {"+ARP", false, arp},
          {"+Mixture Kernel & Bandit", false, full}};
}

OptimizerSpec arm_by_key(const std::string& key, const OptimizerConfig& budget) {
  const auto arms = ablation_arms(budget);
  if (key == "baseline") return arms[0];
  if (key == "tuning") return arms[1];
  if (key == "arp") return arms[2];
  if (key == "full") return arms[3];
  if (key == "random") return random_search_spec(budget);
  throw InputError("unknown arm '" + key + "' (expected baseline, tuning, arp, full or random)");
}

const ArmReport& AblationReport::arm(const std::string& name) const {
  for (const auto& a : arms)
    if (a.name == name) return a;
  throw InputError("no arm named '" + name + "' in the report");
}

AblationReport run_ablation(const std::vector<OptimizerSpec>& arms, const std::vector<Objective>& objectives,
                            const std::vector<std::uint64_t>& seeds) {
  AblationReport report;
  report.seeds = seeds;
  std::vector<OptimizerSpec> all = arms;
  const OptimizerConfig budget = arms.empty() ? OptimizerConfig{} : arms.front().config;
  all.push_back(random_search_spec(budget));
  for (const auto& spec : all) report.arms.push_back({spec.name, {}, 0.0});

  for (const auto& obj : objectives) {
    report.objectives.push_back(obj.name);
    std::vector<std::vector<StudyTrace>> per_arm;
    for (const auto& spec : all) per_arm.push_back(run_study(spec, obj, seeds));
    const auto& reference = per_arm.back();
    for (std::size_t a = 0; a < all.size(); ++a) {
      std::optional<double> score;
      try {
        score = normalized_score(per_arm[a], obj, reference);
      } catch (const UndefinedScoreError&) {
      }
      report.arms[a].scores.push_back(score);
      for (auto& t : per_arm[a]) {
        report.failed_traces += t.failed;
        report.traces.push_back(std::move(t));
      }
    }
  }
  for (auto& arm : report.arms) {
    double sum = 0;
    int n = 0;
    for (const auto& s : arm.scores)
      if (s) {
        sum += *s;
        ++n;
      }
    arm.aggregate = n ? sum / n : 0.0;
  }
  return report;
}

nlohmann::json AblationReport::to_json() const {
  using nlohmann::json;
  json arms_json = json::array();
  const ArmReport& last = arms.size() > 1 ? arms[arms.size() - 2] : arms.front();  // final cumulative arm
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto& arm = arms[a];
    json per = json::object();
    for (std::size_t o = 0; o < objectives.size(); ++o) per[objectives[o]] = optional_number(arm.scores[o]);
    json entry = {{"name", arm.name}, {"aggregate", arm.aggregate}, {"objectives", per}};
    // (S_o - S_b) / S_b of the final arm against this one, in percent.
    const auto vs = relative_improvement(last.aggregate, arm.aggregate);
    entry["final_arm_improvement_pct"] = optional_number(vs ? std::optional<double>(*vs * 100) : std::nullopt);
    if (a > 0 && a + 1 < arms.size()) {
      const auto step = relative_improvement(arm.aggregate, arms[a - 1].aggregate);
      entry["step_improvement_pct"] = optional_number(step ? std::optional<double>(*step * 100) : std::nullopt);
    }
    arms_json.push_back(entry);
  }
  return {{"score", "100 * (1 - (mean final best - optimum) / (mean random-search final best - optimum)), "
                    "clipped at -100; a stand-in for a leaderboard score"},
          {"objectives", objectives},
          {"seeds", seeds},
          {"arms", arms_json},
          {"failed_traces", failed_traces}};
}

void write_traces_csv(std::ostream& out, const std::vector<StudyTrace>& traces, bool wall_clock) {
  out << "objective,optimizer,seed,iteration,best_so_far,wall_s\n";
  char buf[64];
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.best_so_far.size(); ++i) {
      out << t.objective << ",\"" << t.optimizer << "\"," << t.seed << ',' << i + 1 << ',';
      std::snprintf(buf, sizeof buf, "%.17g", t.best_so_far[i]);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.6f", wall_clock ? t.wall_s[i] : 0.0);
      out << buf << '\n';
    }
  }
}

}  // namespace arpbo
