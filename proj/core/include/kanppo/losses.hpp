#ifndef KANPPO_LOSSES_HPP_
#define KANPPO_LOSSES_HPP_

#include <span>
#include <vector>

#include "kanppo/matrix.hpp"
#include "kanppo/policy.hpp"

namespace kanppo {

// Mean over samples of min(r*A, clip(r, 1-eps, 1+eps)*A), negated so the
// optimizer minimizes it. eps = infinity disables clipping exactly.
// Throws on length mismatch.
double clipped_surrogate(std::span<const double> ratio, std::span<const double> adv, double eps);

// Minimization form of the combined objective:
//   policy_loss + c1*value_loss - c2*entropy.
double combined_loss(double policy_loss, double value_loss, double entropy, double c1, double c2);

// Everything about a minibatch except the parameters; frozen while the
// loss and its gradient are evaluated.
struct Minibatch {
  std::vector<Vec> obs;
  std::vector<Vec> actions;
  Vec old_log_probs;
  Vec advantages;
  Vec value_targets;
};

struct LossStats {
  double total = 0.0;
  double policy_loss = 0.0;  // negated clipped surrogate
  double value_loss = 0.0;   // mean squared value error
  double entropy = 0.0;
};

// Combined PPO loss over the minibatch; value_loss = mean (V - target)^2,
// entropy is the closed-form policy entropy.
LossStats ppo_loss(const ActorCritic& ac, const Minibatch& mb, double clip_eps, double c1,
                   double c2);

// Same, also accumulating d(total)/d(theta) into grads, laid out to match
// ActorCritic::get_params ([actor | critic | log_std]). grads must be
// zeroed by the caller and sized total_param_count().
LossStats ppo_loss_grad(const ActorCritic& ac, const Minibatch& mb, double clip_eps, double c1,
                        double c2, std::span<double> grads);

}  // namespace kanppo

#endif  // KANPPO_LOSSES_HPP_
