#include "kanppo/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kanppo {

void SplineConfig::validate() const {
  if (order_k < 1) throw std::invalid_argument("SplineConfig: order_k must be >= 1");
  if (order_k > 12) throw std::invalid_argument("SplineConfig: order_k must be <= 12");
  if (grid_g < 1) throw std::invalid_argument("SplineConfig: grid_g must be >= 1");
  if (!(range_min < range_max)) {
    throw std::invalid_argument("SplineConfig: range_min must be < range_max");
  }
}

namespace detail {

int find_span(const SplineConfig& config, double x_clamped) {
  const double h = config.spacing();
  int cell = static_cast<int>(std::floor((x_clamped - config.range_min) / h));
  cell = std::clamp(cell, 0, config.grid_g - 1);
  return cell + config.order_k;
}

namespace {

// N[r] = B_{span-deg+r, deg}(x) for r = 0..deg (NURBS-book triangle).
void local_basis_degree(const SplineConfig& config, int span, double x, int deg,
                        std::span<double> n) {
  double left[16];
  double right[16];
  n[0] = 1.0;
  for (int d = 1; d <= deg; ++d) {
    left[d] = x - config.knot(span + 1 - d);
    right[d] = config.knot(span + d) - x;
    double saved = 0.0;
    for (int r = 0; r < d; ++r) {
      const double temp = n[r] / (right[r + 1] + left[d - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[d - r] * temp;
    }
    n[d] = saved;
  }
}

}  // namespace

void local_basis(const SplineConfig& config, int span, double x, std::span<double> out) {
  local_basis_degree(config, span, x, config.order_k, out);
}

void local_basis_derivatives(const SplineConfig& config, int span, double x,
                             std::span<double> out) {
  const int k = config.order_k;
  const double h = config.spacing();
  double lower[16];
  local_basis_degree(config, span, x, k - 1, std::span<double>(lower, k));
  // B'_{i,k} = k * (B_{i,k-1}/(t_{i+k}-t_i) - B_{i+1,k-1}/(t_{i+k+1}-t_{i+1}));
  // uniform knots make both denominators k*h.
  for (int r = 0; r <= k; ++r) {
    const double a = (r >= 1) ? lower[r - 1] : 0.0;
    const double b = (r <= k - 1) ? lower[r] : 0.0;
    out[r] = (a - b) / h;
  }
}

}  // namespace detail

namespace {

double clamp_input(const SplineConfig& config, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("spline: input must be finite");
  return std::clamp(x, config.range_min, config.range_max);
}

}  // namespace

Vec basis_values(const SplineConfig& config, double x) {
  const double xc = clamp_input(config, x);
  const int span = detail::find_span(config, xc);
  const int k = config.order_k;
  double local[16];
  detail::local_basis(config, span, xc, std::span<double>(local, k + 1));
  Vec out(config.basis_count(), 0.0);
  for (int r = 0; r <= k; ++r) out[span - k + r] = local[r];
  return out;
}

Vec basis_derivatives(const SplineConfig& config, double x) {
  const double xc = clamp_input(config, x);
  const int span = detail::find_span(config, xc);
  const int k = config.order_k;
  double local[16];
  detail::local_basis_derivatives(config, span, xc, std::span<double>(local, k + 1));
  Vec out(config.basis_count(), 0.0);
  for (int r = 0; r <= k; ++r) out[span - k + r] = local[r];
  return out;
}

double spline_eval(const EdgeFunction& edge, double x) {
  return dot(edge.coeffs, basis_values(edge.config, x));
}

Vec spline_grad_coeffs(const EdgeFunction& edge, double x) {
  return basis_values(edge.config, x);
}

double spline_grad_input(const EdgeFunction& edge, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("spline: input must be finite");
  if (x < edge.config.range_min || x > edge.config.range_max) return 0.0;
  return dot(edge.coeffs, basis_derivatives(edge.config, x));
}

}  // namespace kanppo
