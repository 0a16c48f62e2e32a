#include "kanppo/obs_norm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kanppo {

RunningNorm::RunningNorm(int dim, bool enabled, double clip)
    : mean_(dim, 0.0), m2_(dim, 0.0), enabled_(enabled), clip_(clip) {}

void RunningNorm::update(std::span<const double> x) {
  if (!enabled_) return;
  if (x.size() != mean_.size()) throw std::invalid_argument("RunningNorm: dimension mismatch");
  count_ += 1.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean_[i];
    mean_[i] += d / count_;
    m2_[i] += d * (x[i] - mean_[i]);
  }
}

Vec RunningNorm::normalize(std::span<const double> x) const {
  Vec out(x.begin(), x.end());
  if (!enabled_) return out;
  for (size_t i = 0; i < out.size(); ++i) {
    const double var = count_ > 1.0 ? m2_[i] / count_ : 1.0;
    out[i] = (out[i] - mean_[i]) / std::sqrt(var + 1e-8);
    out[i] = std::clamp(out[i], -clip_, clip_);
  }
  return out;
}

Vec RunningNorm::update_and_normalize(std::span<const double> x) {
  update(x);
  return normalize(x);
}

void RunningNorm::restore(Vec mean, Vec m2, double count, bool enabled, double clip) {
  mean_ = std::move(mean);
  m2_ = std::move(m2);
  count_ = count;
  enabled_ = enabled;
  clip_ = clip;
}

}  // namespace kanppo
