#ifndef KANPPO_ADAM_HPP_
#define KANPPO_ADAM_HPP_

#include <span>

#include "kanppo/matrix.hpp"

namespace kanppo {

// Adam with bias correction (Kingma & Ba). Moment buffers match the flat
// parameter layout they were sized for.
class AdamState {
 public:
  explicit AdamState(size_t param_count, double beta1 = 0.9, double beta2 = 0.999,
                     double eps = 1e-8);

  // params -= lr * m_hat / (sqrt(v_hat) + eps). Throws on layout mismatch.
  void step(std::span<double> params, std::span<const double> grads, double lr);

  long step_count() const { return t_; }
  size_t size() const { return m_.size(); }

 private:
  Vec m_;
  Vec v_;
  long t_ = 0;
  double beta1_;
  double beta2_;
  double eps_;
};

// Scales grads in place so the global L2 norm is at most max_norm
// (disabled when max_norm <= 0). Returns the pre-clip norm.
double clip_grad_norm(std::span<double> grads, double max_norm);

}  // namespace kanppo

#endif  // KANPPO_ADAM_HPP_
