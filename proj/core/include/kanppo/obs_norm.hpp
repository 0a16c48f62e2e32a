#ifndef KANPPO_OBS_NORM_HPP_
#define KANPPO_OBS_NORM_HPP_

#include <span>

#include "kanppo/matrix.hpp"

namespace kanppo {

// Online per-dimension mean/variance (Welford) for observation scaling.
// Training updates it with every observation it consumes; evaluation uses
// the frozen statistics. Normalized values are clipped to +-clip.
class RunningNorm {
 public:
  explicit RunningNorm(int dim = 0, bool enabled = true, double clip = 5.0);

  void update(std::span<const double> x);
  Vec normalize(std::span<const double> x) const;
  Vec update_and_normalize(std::span<const double> x);

  bool enabled() const { return enabled_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Vec& mean() const { return mean_; }
  const Vec& m2() const { return m2_; }

  // Exact-state accessors for checkpointing.
  void restore(Vec mean, Vec m2, double count, bool enabled, double clip);
  double clip() const { return clip_; }

 private:
  Vec mean_;
  Vec m2_;
  double count_ = 0.0;
  bool enabled_ = true;
  double clip_ = 5.0;
};

}  // namespace kanppo

#endif  // KANPPO_OBS_NORM_HPP_
