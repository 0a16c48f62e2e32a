#ifndef KANPPO_SPLINE_HPP_
#define KANPPO_SPLINE_HPP_

#include <span>
#include <vector>

#include "kanppo/matrix.hpp"

namespace kanppo {

// B-spline family of degree `order_k` over `grid_g` uniform intervals of
// [range_min, range_max]. The knot vector is extended by exactly k uniform
// knots beyond each end, which leaves g+k basis functions whose supports
// intersect the domain; those g+k functions form a partition of unity on it
// and give each network edge exactly g+k coefficients.
struct SplineConfig {
  int order_k = 2;
  int grid_g = 3;
  double range_min = -1.0;
  double range_max = 1.0;

  int basis_count() const { return grid_g + order_k; }
  double spacing() const { return (range_max - range_min) / grid_g; }
  // Knot i of the extended vector, i in [0, g+2k].
  double knot(int i) const { return range_min + (i - order_k) * spacing(); }
  int knot_count() const { return grid_g + 2 * order_k + 1; }

  // Throws std::invalid_argument on k < 1, g < 1 or an empty range.
  void validate() const;

  bool operator==(const SplineConfig&) const = default;
};

// One learnable 1-D edge function: x -> sum_i coeffs[i] * B_i(x).
struct EdgeFunction {
  SplineConfig config;
  Vec coeffs;  // length config.basis_count()
};

// Values of the g+k retained basis functions at clamp(x), by Cox-de Boor
// recursion. Each value is in [0,1]; they sum to 1. At interior knots the
// right-continuous span is used.
Vec basis_values(const SplineConfig& config, double x);

// d/dx of each retained basis function at clamp(x), one-sided at the domain
// ends. Callers handle the clamped-input case (see spline_grad_input).
Vec basis_derivatives(const SplineConfig& config, double x);

double spline_eval(const EdgeFunction& edge, double x);

// d(output)/d(coeffs): exactly basis_values(clamp(x)).
Vec spline_grad_coeffs(const EdgeFunction& edge, double x);

// Analytic d(output)/dx; 0 where the input was clamped, since the clamp
// makes the output locally constant in x there.
double spline_grad_input(const EdgeFunction& edge, double x);

namespace detail {
// Index of the knot span containing clamp(x): largest j with knot(j) <= x,
// clamped to the interior spans [k, g+k-1] so x == range_max lands in the
// last span. Shared by the evaluators and by KANLayer.
int find_span(const SplineConfig& config, double x_clamped);

// The k+1 possibly nonzero basis values at x (basis indices span-k .. span);
// writes into out[0..k]. Standard local de Boor triangle.
void local_basis(const SplineConfig& config, int span, double x, std::span<double> out);

// Same but derivatives, via the degree-(k-1) difference identity.
void local_basis_derivatives(const SplineConfig& config, int span, double x,
                             std::span<double> out);
}  // namespace detail

}  // namespace kanppo

#endif  // KANPPO_SPLINE_HPP_
