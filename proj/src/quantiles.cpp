#include "bahadur/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bahadur {

namespace {

// ceil(n*p) as an order-statistic index, tolerant of representation error
// in the product (n*p within 1e-9 of an integer is treated as that integer).
std::int64_t order_index(std::size_t n, double p) {
  const double np = static_cast<double>(n) * p;
  auto k = static_cast<std::int64_t>(std::ceil(np - 1e-9));
  if (k < 1) k = 1;
  if (k > static_cast<std::int64_t>(n)) k = static_cast<std::int64_t>(n);
  return k;
}

}  // namespace

double empirical_cdf(std::span<const double> sample, double t) {
  if (sample.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
  std::size_t count = 0;
  for (double v : sample) count += (v <= t) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double sample_quantile_inplace(std::span<double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sample_quantile: p must be in (0,1)");
  const std::int64_t k = order_index(sample.size(), p);
  auto nth = sample.begin() + (k - 1);
  std::nth_element(sample.begin(), nth, sample.end());
  return *nth;
}

double sample_quantile(std::span<const double> sample, double p) {
  std::vector<double> copy(sample.begin(), sample.end());
  return sample_quantile_inplace(copy, p);
}

QuantileContext make_quantile_context(const PiecewiseFunctional& g, double p) {
  const double xi = true_quantile(g, p);
  return {xi, pdf_gY(g, xi)};
}

QuantileObservation bahadur_remainder(std::span<const double> gaussian_values,
                                      const PiecewiseFunctional& g, double p,
                                      const QuantileContext& ctx) {
  if (gaussian_values.empty()) throw std::invalid_argument("bahadur_remainder: empty path");
  std::vector<double> z(gaussian_values.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = g(gaussian_values[i]);

  QuantileObservation obs;
  obs.n = static_cast<std::int64_t>(z.size());
  obs.p = p;
  obs.f_hat_at_xi = empirical_cdf(z, ctx.xi);
  obs.xi_hat = sample_quantile_inplace(z, p);
  obs.linear_term = (p - obs.f_hat_at_xi) / ctx.density;
  obs.remainder = obs.xi_hat - ctx.xi - obs.linear_term;
  return obs;
}

QuantileObservation bahadur_remainder(const GaussianPath& path, const PiecewiseFunctional& g,
                                      double p) {
  return bahadur_remainder(path.values, g, p, make_quantile_context(g, p));
}

}  // namespace bahadur
