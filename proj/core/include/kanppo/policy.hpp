#ifndef KANPPO_POLICY_HPP_
#define KANPPO_POLICY_HPP_

#include <span>
#include <vector>

#include "kanppo/layers.hpp"
#include "kanppo/rng.hpp"

namespace kanppo {

struct ActionSample {
  Vec action;
  double log_prob;
  double value;
};

struct EvalResult {
  Vec log_probs;
  Vec entropies;
  Vec values;
};

// Diagonal-Gaussian actor plus scalar critic. The action distribution is
// N(actor(obs), diag(exp(log_std)^2)) with a state-independent learnable
// log_std, initialized to 0. log_std is excluded from count_params (the
// paper's Table 1 counts carry no per-action std parameters) but is part
// of the optimizer's flat parameter view, laid out [actor | critic | log_std].
class ActorCritic {
 public:
  ActorCritic(Network actor, Network critic);

  int obs_dim() const { return actor_.in_dim(); }
  int act_dim() const { return actor_.out_dim(); }

  Network& actor() { return actor_; }
  const Network& actor() const { return actor_; }
  Network& critic() { return critic_; }
  const Network& critic() const { return critic_; }
  Vec& log_std() { return log_std_; }
  const Vec& log_std() const { return log_std_; }

  // actor + critic + log_std; the optimizer view.
  size_t total_param_count() const;
  void get_params(std::span<double> out) const;
  void set_params(std::span<const double> in);
  Vec params() const;

  // Draws action ~ N(mean(obs), diag(std^2)) and records log_prob and value.
  // Throws RunAbort if the networks emit a non-finite value.
  ActionSample act_stochastic(std::span<const double> obs, Rng& rng) const;

  // The mean action; what evaluation uses ("without exploration noise").
  Vec act_deterministic(std::span<const double> obs) const;

  double value(std::span<const double> obs) const;

  // Per-sample Gaussian log-density of act under the current policy,
  // closed-form entropy, and critic values.
  EvalResult evaluate_actions(std::span<const Vec> obs_batch,
                              std::span<const Vec> act_batch) const;

  // Diagonal-Gaussian entropy: sum_d (0.5*log(2*pi*e) + log_std_d).
  double entropy() const;

  double log_prob_of(std::span<const double> mean, std::span<const double> action) const;

 private:
  Network actor_;
  Network critic_;
  Vec log_std_;
};

}  // namespace kanppo

#endif  // KANPPO_POLICY_HPP_
