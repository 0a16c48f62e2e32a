#include "kanppo/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kanppo/errors.hpp"

namespace kanppo {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo: gamma must be in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("ppo: lambda must be in [0, 1]");
  const bool clip_disabled = std::isinf(clip_eps) && clip_eps > 0.0;
  if (!clip_disabled && !(clip_eps > 0.0 && clip_eps < 1.0)) {
    throw ConfigError("ppo: clip_eps must be in (0, 1) or +inf to disable clipping");
  }
  if (rollout_T < 1) throw ConfigError("ppo: rollout_T must be >= 1");
  if (minibatch < 1 || minibatch > rollout_T) {
    throw ConfigError("ppo: minibatch must be in [1, rollout_T]");
  }
  if (epochs < 1) throw ConfigError("ppo: epochs must be >= 1");
  if (lr <= 0.0) throw ConfigError("ppo: lr must be > 0");
  if (total_steps < 1) throw ConfigError("ppo: total_steps must be >= 1");
}

Trainer::Trainer(ActorCritic& ac, Env& env, const PpoConfig& cfg, uint64_t seed)
    : ac_(ac),
      env_(env),
      cfg_(cfg),
      seed_(seed),
      rng_env_(Rng(seed).split(1)),
      rng_policy_(Rng(seed).split(2)),
      rng_shuffle_(Rng(seed).split(3)),
      obs_norm_(env.spec().obs_dim, cfg.obs_norm),
      adam_(ac.total_param_count()) {
  cfg_.validate();
  if (ac.obs_dim() != env.spec().obs_dim || ac.act_dim() != env.spec().act_dim) {
    throw std::invalid_argument("Trainer: actor-critic dims do not match environment spec");
  }
}

void Trainer::collect_rollout(RolloutBuffer& buffer, Vec& episode_returns) {
  while (!buffer.full()) {
    const ActionSample sample = ac_.act_stochastic(current_obs_, rng_policy_);
    const StepResult r = env_.step(sample.action);
    episode_return_ += r.reward;

    RolloutBuffer::Step step;
    step.obs = current_obs_;
    step.action = sample.action;
    step.reward = r.reward;
    step.terminated = r.terminated;
    step.truncated = r.truncated;
    step.value = sample.value;
    step.log_prob = sample.log_prob;

    const Vec next_obs = obs_norm_.update_and_normalize(r.obs);
    if (r.truncated) step.bootstrap_value = ac_.value(next_obs);
    buffer.push(std::move(step));

    if (r.done()) {
      episode_returns.push_back(episode_return_);
      episode_return_ = 0.0;
      current_obs_ = obs_norm_.update_and_normalize(env_.reset(rng_env_));
    } else {
      current_obs_ = next_obs;
    }
  }
  buffer.set_final_value(ac_.value(current_obs_));
}

LossStats Trainer::update_params(const RolloutBuffer& buffer) {
  GaeResult gae = compute_gae(buffer, cfg_.gamma, cfg_.lambda);
  if (cfg_.adv_norm) normalize_advantages(gae.advantages);

  const auto& steps = buffer.steps();
  const int t_max = buffer.size();

  Vec params = ac_.params();
  const Vec last_good = params;
  Vec grads(params.size(), 0.0);

  std::vector<int> order(t_max);
  std::iota(order.begin(), order.end(), 0);

  LossStats mean_stats;
  int passes = 0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    // Fisher-Yates with the trainer's own stream keeps runs reproducible.
    for (int i = t_max - 1; i > 0; --i) {
      const int j = static_cast<int>(rng_shuffle_.next_below(static_cast<uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < t_max; start += cfg_.minibatch) {
      const int end = std::min(start + cfg_.minibatch, t_max);
      Minibatch mb;
      mb.obs.reserve(end - start);
      mb.actions.reserve(end - start);
      for (int n = start; n < end; ++n) {
        const int idx = order[n];
        mb.obs.push_back(steps[idx].obs);
        mb.actions.push_back(steps[idx].action);
        mb.old_log_probs.push_back(steps[idx].log_prob);
        mb.advantages.push_back(gae.advantages[idx]);
        mb.value_targets.push_back(gae.returns[idx]);
      }

      std::fill(grads.begin(), grads.end(), 0.0);
      const LossStats stats = ppo_loss_grad(ac_, mb, cfg_.clip_eps, cfg_.c1, cfg_.c2, grads);
      if (!std::isfinite(stats.total)) {
        ac_.set_params(last_good);
        throw RunAbort("ppo: non-finite loss; parameters restored to the pre-update state");
      }
      clip_grad_norm(grads, cfg_.max_grad_norm);
      adam_.step(params, grads, cfg_.lr);
      ac_.set_params(params);

      mean_stats.policy_loss += stats.policy_loss;
      mean_stats.value_loss += stats.value_loss;
      mean_stats.entropy += stats.entropy;
      mean_stats.total += stats.total;
      passes += 1;
    }
  }
  const double inv = 1.0 / passes;
  mean_stats.policy_loss *= inv;
  mean_stats.value_loss *= inv;
  mean_stats.entropy *= inv;
  mean_stats.total *= inv;
  return mean_stats;
}

void Trainer::train(const RunRecordSink& sink, const UpdateHook& on_update) {
  const auto start = std::chrono::steady_clock::now();
  current_obs_ = obs_norm_.update_and_normalize(env_.reset(rng_env_));
  episode_return_ = 0.0;

  const long n_updates = (cfg_.total_steps + cfg_.rollout_T - 1) / cfg_.rollout_T;
  double last_mean_return = std::numeric_limits<double>::quiet_NaN();

  RolloutBuffer buffer(cfg_.rollout_T);
  for (long update = 0; update < n_updates; ++update) {
    buffer.clear();
    Vec episode_returns;
    collect_rollout(buffer, episode_returns);
    const LossStats stats = update_params(buffer);

    if (!episode_returns.empty()) {
      double sum = 0.0;
      for (double r : episode_returns) sum += r;
      last_mean_return = sum / static_cast<double>(episode_returns.size());
    }

    if (sink) {
      RunRecord rec;
      rec.seed = seed_;
      rec.steps = (update + 1) * static_cast<long>(cfg_.rollout_T);
      rec.update = static_cast<int>(update);
      rec.mean_return = last_mean_return;
      rec.policy_loss = stats.policy_loss;
      rec.value_loss = stats.value_loss;
      rec.entropy = stats.entropy;
      rec.wall_ms = cfg_.log_timing
                        ? std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count()
                        : 0;
      sink(rec);
    }
    if (on_update) on_update(static_cast<int>(update));
  }
}

EvalStats evaluate(const ActorCritic& ac, Env& env, int episodes, Rng& rng,
                   const RunningNorm& obs_norm) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  EvalStats stats;
  stats.returns.reserve(episodes);
  for (int e = 0; e < episodes; ++e) {
    Vec obs = obs_norm.normalize(env.reset(rng));
    double ep_return = 0.0;
    for (;;) {
      const Vec action = ac.act_deterministic(obs);
      const StepResult r = env.step(action);
      ep_return += r.reward;
      if (r.done()) break;
      obs = obs_norm.normalize(r.obs);
    }
    stats.returns.push_back(ep_return);
  }
  double sum = 0.0;
  stats.min = stats.returns.front();
  stats.max = stats.returns.front();
  for (double r : stats.returns) {
    sum += r;
    stats.min = std::min(stats.min, r);
    stats.max = std::max(stats.max, r);
  }
  stats.mean = sum / static_cast<double>(stats.returns.size());
  double var = 0.0;
  for (double r : stats.returns) var += (r - stats.mean) * (r - stats.mean);
  stats.stddev = std::sqrt(var / static_cast<double>(stats.returns.size()));
  return stats;
}

}  // namespace kanppo
