#ifndef KANPPO_ROLLOUT_HPP_
#define KANPPO_ROLLOUT_HPP_

#include <vector>

#include "kanppo/matrix.hpp"

namespace kanppo {

// Fixed-capacity trajectory storage for one update cycle. Episode ends are
// flagged per step; GAE never propagates an advantage across either flag.
// Termination stops the value bootstrap; truncation bootstraps from the
// stored value of the episode's final observation.
class RolloutBuffer {
 public:
  explicit RolloutBuffer(int capacity);

  struct Step {
    Vec obs;  // as consumed by the policy (normalized when enabled)
    Vec action;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    double value = 0.0;
    double log_prob = 0.0;
    double bootstrap_value = 0.0;  // V(final obs) when truncated, else unused
  };

  void push(Step step);
  bool full() const { return static_cast<int>(steps_.size()) == capacity_; }
  int size() const { return static_cast<int>(steps_.size()); }
  int capacity() const { return capacity_; }
  const std::vector<Step>& steps() const { return steps_; }

  // V(s_T) used when the buffer ends mid-episode.
  void set_final_value(double v) { final_value_ = v; }
  double final_value() const { return final_value_; }

  void clear();

 private:
  int capacity_;
  std::vector<Step> steps_;
  double final_value_ = 0.0;
};

struct GaeResult {
  Vec advantages;
  Vec returns;  // advantages + values; the critic's regression target
};

// delta_t = r_t + gamma*V(s_{t+1})*(1 - done_t) - V(s_t), accumulated
// backward as A_t = delta_t + gamma*lambda*(1 - done_t)*A_{t+1}, where a
// truncated step substitutes its stored bootstrap value for V(s_{t+1})
// while still cutting the advantage recursion. Throws on an unfilled buffer.
GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

// In-place batch normalization to zero mean, unit std (eps-guarded).
void normalize_advantages(Vec& advantages);

}  // namespace kanppo

#endif  // KANPPO_ROLLOUT_HPP_
