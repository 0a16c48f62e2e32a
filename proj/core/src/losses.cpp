#include "kanppo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kanppo {

double clipped_surrogate(std::span<const double> ratio, std::span<const double> adv,
                         double eps) {
  if (ratio.size() != adv.size()) {
    throw std::invalid_argument("clipped_surrogate: ratio/advantage length mismatch");
  }
  if (ratio.empty()) throw std::invalid_argument("clipped_surrogate: empty batch");
  double sum = 0.0;
  for (size_t t = 0; t < ratio.size(); ++t) {
    const double unclipped = ratio[t] * adv[t];
    const double clipped = std::clamp(ratio[t], 1.0 - eps, 1.0 + eps) * adv[t];
    sum += std::min(unclipped, clipped);
  }
  return -sum / static_cast<double>(ratio.size());
}

double combined_loss(double policy_loss, double value_loss, double entropy, double c1,
                     double c2) {
  return policy_loss + c1 * value_loss - c2 * entropy;
}

namespace {

LossStats ppo_loss_impl(const ActorCritic& ac, const Minibatch& mb, double clip_eps, double c1,
                        double c2, std::span<double> grads) {
  const size_t n = mb.obs.size();
  if (n == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  if (mb.actions.size() != n || mb.old_log_probs.size() != n || mb.advantages.size() != n ||
      mb.value_targets.size() != n) {
    throw std::invalid_argument("ppo_loss: minibatch field lengths disagree");
  }
  const bool with_grad = !grads.empty();
  if (with_grad && grads.size() != ac.total_param_count()) {
    throw std::invalid_argument("ppo_loss_grad: gradient buffer size mismatch");
  }

  const Network& actor = ac.actor();
  const Network& critic = ac.critic();
  const Vec& log_std = ac.log_std();
  const int act_dim = ac.act_dim();
  const double inv_n = 1.0 / static_cast<double>(n);

  const size_t actor_pc = actor.param_count();
  const size_t critic_pc = critic.param_count();
  GradBuffer actor_grads(with_grad ? actor_pc : 0);
  GradBuffer critic_grads(with_grad ? critic_pc : 0);
  Vec log_std_grads(with_grad ? act_dim : 0, 0.0);

  double policy_sum = 0.0;
  double value_sum = 0.0;
  ForwardCache actor_cache;
  ForwardCache critic_cache;

  for (size_t s = 0; s < n; ++s) {
    const Vec mean = actor.forward(mb.obs[s], with_grad ? &actor_cache : nullptr);
    const double v = critic.forward(mb.obs[s], with_grad ? &critic_cache : nullptr)[0];

    const double logp = ac.log_prob_of(mean, mb.actions[s]);
    const double ratio = std::exp(logp - mb.old_log_probs[s]);
    const double a = mb.advantages[s];
    const double unclipped = ratio * a;
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * a;
    policy_sum += std::min(unclipped, clipped);

    const double verr = v - mb.value_targets[s];
    value_sum += verr * verr;

    if (!with_grad) continue;

    // d(total)/d(logp): the min picks the unclipped branch (derivative A)
    // or the clipped branch, whose derivative in the flat region is 0.
    const double dobj_dratio = (unclipped <= clipped) ? a : 0.0;
    const double dtotal_dlogp = -inv_n * dobj_dratio * ratio;
    if (dtotal_dlogp != 0.0) {
      Vec grad_mean(act_dim);
      for (int d = 0; d < act_dim; ++d) {
        const double sd2 = std::exp(2.0 * log_std[d]);
        const double diff = mb.actions[s][d] - mean[d];
        grad_mean[d] = dtotal_dlogp * diff / sd2;
        // d logp / d log_std_d = -1 + diff^2 / sd^2
        log_std_grads[d] += dtotal_dlogp * (-1.0 + diff * diff / sd2);
      }
      actor.backward(actor_cache, grad_mean, actor_grads);
    }

    const double dtotal_dv = c1 * 2.0 * verr * inv_n;
    const Vec grad_v{dtotal_dv};
    critic.backward(critic_cache, grad_v, critic_grads);
  }

  LossStats stats;
  stats.policy_loss = -policy_sum * inv_n;
  stats.value_loss = value_sum * inv_n;
  stats.entropy = ac.entropy();
  stats.total = combined_loss(stats.policy_loss, stats.value_loss, stats.entropy, c1, c2);

  if (with_grad) {
    for (size_t i = 0; i < actor_pc; ++i) grads[i] += actor_grads.grads[i];
    for (size_t i = 0; i < critic_pc; ++i) grads[actor_pc + i] += critic_grads.grads[i];
    // Entropy depends on log_std only; d(-c2*S)/d log_std_d = -c2.
    for (int d = 0; d < act_dim; ++d) {
      grads[actor_pc + critic_pc + d] += log_std_grads[d] - c2;
    }
  }
  return stats;
}

}  // namespace

LossStats ppo_loss(const ActorCritic& ac, const Minibatch& mb, double clip_eps, double c1,
                   double c2) {
  return ppo_loss_impl(ac, mb, clip_eps, c1, c2, {});
}

LossStats ppo_loss_grad(const ActorCritic& ac, const Minibatch& mb, double clip_eps, double c1,
                        double c2, std::span<double> grads) {
  return ppo_loss_impl(ac, mb, clip_eps, c1, c2, grads);
}

}  // namespace kanppo
