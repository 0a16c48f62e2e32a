#ifndef KANPPO_ENV_HPP_
#define KANPPO_ENV_HPP_

#include <span>
#include <string>
#include <utility>

#include "kanppo/matrix.hpp"
#include "kanppo/rng.hpp"

namespace kanppo {

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int act_dim = 0;
  Vec action_low;
  Vec action_high;
  int max_episode_steps = 0;  // 0 = unbounded / managed by the environment
};

struct StepResult {
  Vec obs;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  bool done() const { return terminated || truncated; }
};

// Single-owner episodic environment. reset() must precede step();
// stepping a finished episode throws std::logic_error. Out-of-bounds
// action components are clipped to the spec bounds before the dynamics
// see them.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(Rng& rng) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
};

// Observation/action dimensions of the six benchmark tasks whose parameter
// counts the tables audit. Throws std::invalid_argument on unknown names.
std::pair<int, int> paper_env_dims(const std::string& name);

// The six names, in table order.
std::span<const std::string> paper_env_names();

}  // namespace kanppo

#endif  // KANPPO_ENV_HPP_
