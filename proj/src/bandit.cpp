#include "arpbo/bandit.hpp"

#include <random>

#include "arpbo/errors.hpp"

namespace arpbo {

BanditState BanditState::for_space(const SearchSpace& space) {
  BanditState s;
  for (int idx : space.qualitative_dims()) {
    const int k = space.param(idx).arm_count();
    s.variables.push_back({idx, Vector::Ones(k), Vector::Ones(k)});
  }
  return s;
}

double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x + y > 0 ? x / (x + y) : 0.5;
}

ArmSelection ts_select(const BanditState& state, Rng& rng) {
  ArmSelection out;
  out.reserve(state.variables.size());
  for (const auto& var : state.variables) {
    int best = 0;
    double best_theta = -1.0;
    for (int k = 0; k < var.arms(); ++k) {
      const double theta = sample_beta(var.alpha(k), var.beta(k), rng);
      if (theta > best_theta) {
        best_theta = theta;
        best = k;
      }
    }
    out.push_back(best);
  }
  return out;
}

void overwrite_qualitative(Eigen::Ref<Vector> candidate, const ArmSelection& selection, const BanditState& state,
                           const SearchSpace& space) {
  if (selection.size() != state.variables.size())
    throw ContractError("selection does not cover every qualitative variable");
  for (std::size_t v = 0; v < state.variables.size(); ++v) {
    const auto& var = state.variables[v];
    if (selection[v] < 0 || selection[v] >= var.arms()) throw ContractError("selected arm out of range");
    candidate(var.param_index) = arm_coordinate(space.param(var.param_index), selection[v]);
  }
}

Matrix overwrite_qualitative(Matrix candidates, const std::vector<ArmSelection>& selections,
                             const BanditState& state, const SearchSpace& space) {
  if (static_cast<Eigen::Index>(selections.size()) != candidates.rows())
    throw ContractError("one selection per candidate required");
  for (Eigen::Index r = 0; r < candidates.rows(); ++r) {
    Vector row = candidates.row(r).transpose();
    overwrite_qualitative(row, selections[static_cast<std::size_t>(r)], state, space);
    candidates.row(r) = row.transpose();
  }
  return candidates;
}

ArmSelection arms_of(const WarpedVector& w, const BanditState& state, const SearchSpace& space) {
  ArmSelection out;
  for (const auto& var : state.variables) out.push_back(arm_index(space.param(var.param_index), w(var.param_index)));
  return out;
}

BanditState update_rewards(BanditState state, const std::vector<ArmSelection>& chosen,
                           const std::vector<bool>& new_best, const BanditConfig& config) {
  if (chosen.size() != new_best.size()) throw ContractError("one reward flag per observed point required");
  for (std::size_t p = 0; p < chosen.size(); ++p) {
    if (chosen[p].size() != state.variables.size())
      throw ContractError("chosen arms do not cover every qualitative variable");
    for (std::size_t v = 0; v < state.variables.size(); ++v)
      if (chosen[p][v] < 0 || chosen[p][v] >= state.variables[v].arms())
        throw ContractError("arm index out of range");
  }
  for (std::size_t p = 0; p < chosen.size(); ++p) {
    for (std::size_t v = 0; v < state.variables.size(); ++v) {
      auto& var = state.variables[v];
      if (new_best[p]) {
        var.alpha(chosen[p][v]) += 1.0;
      } else if (config.beta_update) {
        var.beta(chosen[p][v]) += 1.0;
      }
    }
  }
  return state;
}

}  // namespace arpbo
