#include "kanppo/rollout.hpp"

#include <cmath>
#include <stdexcept>

namespace kanppo {

RolloutBuffer::RolloutBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("RolloutBuffer: capacity must be >= 1");
  steps_.reserve(capacity);
}

void RolloutBuffer::push(Step step) {
  if (full()) throw std::logic_error("RolloutBuffer: push beyond capacity");
  steps_.push_back(std::move(step));
}

void RolloutBuffer::clear() {
  steps_.clear();
  final_value_ = 0.0;
}

GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  const auto& steps = buffer.steps();
  if (steps.empty()) throw std::invalid_argument("compute_gae: empty buffer");
  const int t_max = static_cast<int>(steps.size());
  GaeResult out;
  out.advantages.assign(t_max, 0.0);
  out.returns.assign(t_max, 0.0);

  double next_advantage = 0.0;
  for (int t = t_max - 1; t >= 0; --t) {
    const auto& s = steps[t];
    double next_value;
    if (s.terminated) {
      next_value = 0.0;
    } else if (s.truncated) {
      next_value = s.bootstrap_value;
    } else {
      next_value = (t + 1 < t_max) ? steps[t + 1].value : buffer.final_value();
    }
    const bool done = s.terminated || s.truncated;
    const double delta = s.reward + gamma * next_value - s.value;
    const double adv = delta + gamma * lambda * (done ? 0.0 : next_advantage);
    out.advantages[t] = adv;
    out.returns[t] = adv + s.value;
    next_advantage = adv;
  }
  return out;
}

void normalize_advantages(Vec& advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= n;
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : advantages) a = (a - mean) * inv;
}

}  // namespace kanppo
