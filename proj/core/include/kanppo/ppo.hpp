#ifndef KANPPO_PPO_HPP_
#define KANPPO_PPO_HPP_

#include <cstdint>
#include <functional>

#include "kanppo/adam.hpp"
#include "kanppo/env.hpp"
#include "kanppo/losses.hpp"
#include "kanppo/obs_norm.hpp"
#include "kanppo/policy.hpp"
#include "kanppo/rollout.hpp"

namespace kanppo {

struct PpoConfig {
  double lr = 3e-4;
  double clip_eps = 0.2;
  int epochs = 10;
  int minibatch = 64;
  double gamma = 0.99;
  double lambda = 0.95;
  int rollout_T = 2048;
  double c1 = 0.5;           // value-loss coefficient
  double c2 = 0.0;           // entropy coefficient
  double max_grad_norm = 0.5;  // <= 0 disables clipping
  long total_steps = 1000000;
  bool adv_norm = true;   // normalize advantages once per update batch
  bool obs_norm = true;   // running observation normalization
  bool log_timing = false;  // real wall-clock in records; breaks byte-identical logs

  void validate() const;
};

// One CSV row per rollout/update. wall_ms is 0 unless log_timing is set,
// keeping default logs byte-identical across reruns.
struct RunRecord {
  uint64_t seed = 0;
  long steps = 0;
  int update = 0;
  double mean_return = 0.0;  // mean return of episodes completed this rollout
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  long wall_ms = 0;
};

using RunRecordSink = std::function<void(const RunRecord&)>;
using UpdateHook = std::function<void(int update_index)>;

struct EvalStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  Vec returns;
};

// Single-threaded PPO (Algorithm: collect T steps, GAE, K epochs of
// minibatch updates on the clipped combined loss, Adam). Deterministic for
// a fixed seed. Aborts with RunAbort on a non-finite loss after restoring
// the last parameters that produced finite losses.
class Trainer {
 public:
  Trainer(ActorCritic& ac, Env& env, const PpoConfig& cfg, uint64_t seed);

  // Runs ceil(total_steps / rollout_T) update cycles.
  void train(const RunRecordSink& sink = {}, const UpdateHook& on_update = {});

  RunningNorm& obs_norm() { return obs_norm_; }
  const RunningNorm& obs_norm() const { return obs_norm_; }
  long optimizer_steps() const { return adam_.step_count(); }

 private:
  void collect_rollout(RolloutBuffer& buffer, Vec& episode_returns);
  LossStats update_params(const RolloutBuffer& buffer);

  ActorCritic& ac_;
  Env& env_;
  PpoConfig cfg_;
  uint64_t seed_;
  Rng rng_env_;
  Rng rng_policy_;
  Rng rng_shuffle_;
  RunningNorm obs_norm_;
  AdamState adam_;
  Vec current_obs_;  // normalized, policy-ready
  double episode_return_ = 0.0;
};

// Deterministic-policy evaluation with frozen observation statistics;
// rng drives only the environment resets.
EvalStats evaluate(const ActorCritic& ac, Env& env, int episodes, Rng& rng,
                   const RunningNorm& obs_norm);

}  // namespace kanppo

#endif  // KANPPO_PPO_HPP_
