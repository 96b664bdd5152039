#pragma once

#include <vector>

#include "arpbo/space.hpp"
#include "arpbo/types.hpp"

namespace arpbo {

struct BanditConfig {
  /// Also reward failures with beta += 1 (Bernoulli Thompson sampling). When
  /// off only new-best points update the arms.
  bool beta_update = true;
};

/// Beta(alpha, beta) arms for one qualitative parameter.
struct ArmPosterior {
  int param_index = 0;  // position in the search space
  Vector alpha;
  Vector beta;

  int arms() const { return static_cast<int>(alpha.size()); }
};

/// One Thompson-sampling bandit per qualitative parameter, every arm
/// starting at Beta(1, 1).
struct BanditState {
  std::vector<ArmPosterior> variables;

  static BanditState for_space(const SearchSpace& space);
  bool empty() const { return variables.empty(); }
};

/// Chosen arm per qualitative parameter, in the order of BanditState::variables.
using ArmSelection = std::vector<int>;

/// Draws theta_k ~ Beta(alpha_k, beta_k) for every arm of every variable and
/// returns the argmax per variable (lowest index on ties).
ArmSelection ts_select(const BanditState& state, Rng& rng);

/// Writes the selected arms into the qualitative coordinates of one warped
/// vector; continuous and integer coordinates are left alone.
void overwrite_qualitative(Eigen::Ref<Vector> candidate, const ArmSelection& selection, const BanditState& state,
                           const SearchSpace& space);

/// Applies one selection per row.
Matrix overwrite_qualitative(Matrix candidates, const std::vector<ArmSelection>& selections,
                             const BanditState& state, const SearchSpace& space);

/// Arms encoded in a warped vector's qualitative coordinates.
ArmSelection arms_of(const WarpedVector& w, const BanditState& state, const SearchSpace& space);

/// alpha += 1 on the chosen arms of new-best points; beta += 1 on the chosen
/// arms of the others when config.beta_update is set.
BanditState update_rewards(BanditState state, const std::vector<ArmSelection>& chosen,
                           const std::vector<bool>& new_best, const BanditConfig& config = {});

/// Beta(a, b) draw via two gamma variates.
double sample_beta(double a, double b, Rng& rng);

}  // namespace arpbo
