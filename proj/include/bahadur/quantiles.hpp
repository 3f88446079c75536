#pragma once

#include <cstdint>
#include <span>

#include "bahadur/functionals.hpp"
#include "bahadur/gaussproc.hpp"

namespace bahadur {

/// (1/n) #{i : sample_i <= t}. Rejects empty samples.
double empirical_cdf(std::span<const double> sample, double t);

/// inf{x : F_hat(x) >= p}, i.e. the ceil(n p)-th order statistic, found by
/// quickselect in expected O(n). The input span is permuted.
double sample_quantile_inplace(std::span<double> sample, double p);

/// Copying wrapper around sample_quantile_inplace.
double sample_quantile(std::span<const double> sample, double p);

/// One path's Bahadur decomposition at order p:
///   xi_hat - xi = (p - F_hat(xi)) / f(xi) + remainder.
struct QuantileObservation {
  std::int64_t n = 0;
  double p = 0.0;
  double xi_hat = 0.0;        // sample quantile of the transformed path
  double f_hat_at_xi = 0.0;   // empirical CDF of g(Y) at the true quantile
  double linear_term = 0.0;   // (p - f_hat_at_xi) / f(xi)
  double remainder = 0.0;     // xi_hat - xi - linear_term, exactly
};

/// True quantile and density of g(Y) at order p, precomputed once so the
/// Monte-Carlo harness does not re-derive them per replicate.
struct QuantileContext {
  double xi = 0.0;
  double density = 0.0;
};
QuantileContext make_quantile_context(const PiecewiseFunctional& g, double p);

QuantileObservation bahadur_remainder(std::span<const double> gaussian_values,
                                      const PiecewiseFunctional& g, double p,
                                      const QuantileContext& ctx);
QuantileObservation bahadur_remainder(const GaussianPath& path, const PiecewiseFunctional& g,
                                      double p);

}  // namespace bahadur
