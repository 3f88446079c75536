#include "bahadur/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bahadur {

namespace {

double ipow(double base, int exp) {
  double result = 1.0, b = base;
  for (int e = exp; e > 0; e >>= 1) {
    if (e & 1) result *= b;
    b *= b;
  }
  return result;
}

// Bound on sum_{i > lag_cap} |rho(i)|^tau, per model family.
double dropped_lag_sum(const CorrelationModel& model, int tau, std::int64_t lag_cap) {
  const double L = static_cast<double>(lag_cap);
  switch (model.kind()) {
    case CorrelationModel::Kind::Iid:
      return 0.0;
    case CorrelationModel::Kind::Ar1: {
      const double q = ipow(std::fabs(model.param()), tau);
      if (q == 0.0) return 0.0;
      return std::pow(q, L + 1.0) / (1.0 - q);
    }
    case CorrelationModel::Kind::PowerLaw: {
      const double at = model.decay_alpha() * tau;
      return std::pow(L, 1.0 - at) / (at - 1.0);
    }
    case CorrelationModel::Kind::FgnIncrements: {
      const double alpha = model.decay_alpha();
      if (std::isinf(alpha)) return 0.0;
      const double at = alpha * tau;
      // |rho(i)| <= K i^{-alpha} for i > L with K calibrated at L+1.
      const double k_cal = std::fabs(model.rho(lag_cap + 1)) * std::pow(L + 1.0, alpha);
      return ipow(k_cal, tau) * std::pow(L, 1.0 - at) / (at - 1.0);
    }
  }
  return 0.0;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Srd:
      return "SRD";
    case Regime::Boundary:
      return "Boundary";
    case Regime::Lrd:
      return "LRD";
  }
  return "SRD";
}

RateSpec classify_regime(double alpha, int tau_bar) {
  if (!(alpha > 0.0)) throw std::invalid_argument("classify_regime: alpha must be positive");
  if (tau_bar < 1) throw std::invalid_argument("classify_regime: tau_bar must be >= 1");
  const double at = alpha * static_cast<double>(tau_bar);
  RateSpec spec{alpha, tau_bar, Regime::Srd};
  if (std::fabs(at - 1.0) <= 1e-12)
    spec.regime = Regime::Boundary;
  else if (at < 1.0)
    spec.regime = Regime::Lrd;
  return spec;
}

double rate_rn(const RateSpec& spec, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("rate_rn: need n >= 2");
  const double nn = static_cast<double>(n);
  switch (spec.regime) {
    case Regime::Srd:
      return 1.0 / std::sqrt(nn);
    case Regime::Boundary:
      return std::sqrt(std::log(nn) / nn);
    case Regime::Lrd:
      return std::pow(nn, -0.5 * spec.alpha * static_cast<double>(spec.tau_bar));
  }
  return 1.0 / std::sqrt(nn);
}

Sigma2Result sigma2_p(const PiecewiseFunctional& g, double p, const CorrelationModel& model,
                      int max_order, std::int64_t lag_cap) {
  if (lag_cap < 1) throw std::invalid_argument("sigma2_p: lag_cap must be >= 1");
  const double xi = true_quantile(g, p);
  const double f = pdf_gY(g, xi);
  const HermiteCoefficients coeffs = coefficients_of_indicator(g, xi, max_order);
  if (max_order < coeffs.rank) throw std::invalid_argument("sigma2_p: max_order below rank");

  const double alpha = model.decay_alpha();
  const RateSpec spec = classify_regime(alpha, coeffs.rank);
  if (spec.regime != Regime::Srd)
    throw std::domain_error("sigma2_p: variance series requires alpha * tau > 1, regime is " +
                            std::string(regime_name(spec.regime)));

  // Lag 0 contributes the exact Var h = F(1-F); truncation in the order only
  // affects |i| >= 1 where each dropped order carries a factor rho^{J+1}.
  double series = coeffs.var_h;
  double order_tail = 0.0;
  for (std::int64_t i = 1; i <= lag_cap; ++i) {
    const double r = model.rho(i);
    series += 2.0 * cross_moment(coeffs, r);
    order_tail += 2.0 * coeffs.var_h * ipow(std::fabs(r), max_order + 1);
  }
  const double lag_tail = 2.0 * coeffs.var_h * dropped_lag_sum(model, coeffs.rank, lag_cap);

  Sigma2Result out;
  out.value = series / (f * f);
  out.tail_bound = (lag_tail + order_tail) / (f * f);
  if (out.tail_bound > 1e-3 * out.value)
    throw std::domain_error("sigma2_p: tail bound exceeds 1e-3 of the value; raise lag_cap");
  return out;
}

double k_const(int tau, double alpha) {
  if (tau < 1) throw std::invalid_argument("k_const: tau must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("k_const: alpha must be positive");
  const double at = alpha * static_cast<double>(tau);
  if (at >= 1.0) throw std::domain_error("k_const: defined only for alpha * tau < 1");
  double fact = 1.0;
  for (int k = 2; k <= tau; ++k) fact *= static_cast<double>(k);
  const double base = 2.0 * std::tgamma(alpha) * std::sin(std::numbers::pi * (1.0 - alpha) / 2.0);
  const double radicand = (1.0 - at / 2.0) * (1.0 - at) / (fact * ipow(base, tau));
  if (!(radicand > 0.0)) throw std::domain_error("k_const: nonpositive radicand");
  return std::sqrt(radicand);
}

double var_empirical_cdf(const CorrelationModel& model, const HermiteCoefficients& coeffs,
                         std::int64_t n) {
  if (n < 1) throw std::invalid_argument("var_empirical_cdf: need n >= 1");
  const double nn = static_cast<double>(n);
  double acc = nn * coeffs.var_h;
  for (std::int64_t k = 1; k < n; ++k)
    acc += 2.0 * static_cast<double>(n - k) * cross_moment(coeffs, model.rho(k));
  return acc / (nn * nn);
}

}  // namespace bahadur
