#include "bahadur/asymptotics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "support/oracles.hpp"

using namespace bahadur;

TEST_CASE("classify_regime three-way split") {
  CHECK(classify_regime(2.0, 1).regime == Regime::Srd);
  CHECK(classify_regime(0.5, 2).regime == Regime::Boundary);
  CHECK(classify_regime(0.3, 2).regime == Regime::Lrd);
  CHECK(classify_regime(std::numeric_limits<double>::infinity(), 1).regime == Regime::Srd);
  CHECK_THROWS_AS(classify_regime(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(classify_regime(1.0, 0), std::invalid_argument);
}

TEST_CASE("rate_rn branches") {
  CHECK(rate_rn(classify_regime(2.0, 1), 10000) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(rate_rn(classify_regime(0.3, 1), 10000) ==
        doctest::Approx(oracle::kRate03n1e4).epsilon(1e-13));
  const auto boundary = classify_regime(0.5, 2);
  const auto n_e2 = static_cast<std::int64_t>(std::ceil(std::exp(2.0)));
  // log is not exactly 2 at the integer ceiling; evaluate the formula directly.
  CHECK(rate_rn(boundary, n_e2) ==
        doctest::Approx(std::sqrt(std::log(static_cast<double>(n_e2)) / n_e2)).epsilon(1e-14));
  CHECK_THROWS_AS(rate_rn(boundary, 1), std::invalid_argument);
}

TEST_CASE("rate_rn strictly decreasing in n") {
  for (const auto& spec :
       {classify_regime(2.0, 1), classify_regime(0.5, 2), classify_regime(0.3, 1)}) {
    double prev = rate_rn(spec, 3);
    for (std::int64_t n = 4; n < 4000; n += 37) {
      const double r = rate_rn(spec, n);
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("sigma2_p degenerates to the classical iid quantile variance") {
  const auto identity = make_functional("identity");
  const auto iid = CorrelationModel::iid();

  const auto s = sigma2_p(identity, 0.5, iid);
  CHECK(s.value == doctest::Approx(oracle::kPiHalf).epsilon(1e-10));
  CHECK(s.tail_bound == 0.0);

  // p(1-p)/f(xi)^2 for every bundled functional and p.
  for (const auto& name : functional_names()) {
    const auto g = make_functional(name);
    for (double p : {0.1, 0.5, 0.9}) {
      const double xi = true_quantile(g, p);
      const double f = pdf_gY(g, xi);
      const auto r = sigma2_p(g, p, iid);
      CHECK(r.value == doctest::Approx(p * (1.0 - p) / (f * f)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sigma2_p under dependence exceeds the iid value") {
  const auto identity = make_functional("identity");
  const auto iid_value = sigma2_p(identity, 0.5, CorrelationModel::iid()).value;
  const auto ar_value = sigma2_p(identity, 0.5, CorrelationModel::ar1(0.5)).value;
  CHECK(ar_value > iid_value);

  // Brute-force double series over lags, same truncation order.
  const auto model = CorrelationModel::ar1(0.5);
  const double xi = true_quantile(identity, 0.5);
  const auto coeffs = coefficients_of_indicator(identity, xi, 20);
  const double f = pdf_gY(identity, xi);
  double brute = coeffs.var_h;
  for (std::int64_t i = 1; i <= 10000; ++i) {
    double term = 0.0, fact = 1.0, power = 1.0;
    const double rho = model.rho(i);
    for (int j = 1; j <= 20; ++j) {
      fact *= j;
      power *= rho;
      if (j < coeffs.rank) continue;
      term += coeffs.c[j] * coeffs.c[j] / fact * power;
    }
    brute += 2.0 * term;
  }
  brute /= f * f;
  CHECK(ar_value == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("sigma2_p refuses non-summable regimes") {
  const auto identity = make_functional("identity");
  CHECK_THROWS_AS(sigma2_p(identity, 0.5, CorrelationModel::power_law(0.3)), std::domain_error);
  // Boundary refusal: alpha = 0.5 with rank-2 functional.
  CHECK_THROWS_AS(sigma2_p(make_functional("abs"), 0.5, CorrelationModel::power_law(0.5)),
                  std::domain_error);
  // SRD power law works and carries a small positive tail bound.
  const auto r = sigma2_p(identity, 0.5, CorrelationModel::power_law(2.0));
  CHECK(r.value > 0.0);
  CHECK(r.tail_bound > 0.0);
  CHECK(r.tail_bound <= 1e-3 * r.value);
  // A tiny lag cap trips the tail-bound guard.
  CHECK_THROWS_AS(sigma2_p(identity, 0.5, CorrelationModel::power_law(1.2), 20, 3),
                  std::domain_error);
}

TEST_CASE("k_const values and domain") {
  CHECK(k_const(1, 0.5) == doctest::Approx(oracle::kKConst1Half).epsilon(1e-12));

  // As alpha*tau -> 1 the numerator factor (1 - alpha*tau) vanishes; for
  // tau = 1 the denominator's sin(pi(1-alpha)/2) vanishes at the same rate,
  // so K tends to sqrt(1/(2 pi)) rather than 0. For tau >= 2 the sine stays
  // positive and K does vanish.
  CHECK(k_const(1, 0.999999) ==
        doctest::Approx(std::sqrt(0.5 / std::numbers::pi)).epsilon(1e-4));
  CHECK(k_const(2, 0.499999) < 2e-3);
  CHECK(k_const(2, 0.4999999999) < 2e-5);

  // Dual gamma implementations agree to 1e-10 relative.
  for (int tau : {1, 2, 3}) {
    for (double alpha : {0.05, 0.15, 0.25, 0.31}) {
      if (alpha * tau >= 1.0) continue;
      double fact = 1.0;
      for (int k = 2; k <= tau; ++k) fact *= k;
      const double base =
          2.0 * oracle::lanczos_gamma(alpha) * std::sin(std::numbers::pi * (1.0 - alpha) / 2.0);
      const double reference =
          std::sqrt((1.0 - alpha * tau / 2.0) * (1.0 - alpha * tau) / (fact * std::pow(base, tau)));
      CHECK(k_const(tau, alpha) == doctest::Approx(reference).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(k_const(1, 1.0), std::domain_error);
  CHECK_THROWS_AS(k_const(2, 0.5), std::domain_error);
  CHECK_THROWS_AS(k_const(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(k_const(1, -0.1), std::invalid_argument);
}

TEST_CASE("var_empirical_cdf exact cases and brute force") {
  const auto identity = make_functional("identity");
  const double xi = true_quantile(identity, 0.5);
  const auto coeffs = coefficients_of_indicator(identity, xi, 20);

  // IID: F(1-F)/n to machine precision.
  const auto iid = CorrelationModel::iid();
  for (std::int64_t n : {1, 7, 512}) {
    CHECK(var_empirical_cdf(iid, coeffs, n) ==
          doctest::Approx(0.25 / static_cast<double>(n)).epsilon(1e-14));
  }

  // All-zero coefficients give zero variance.
  HermiteCoefficients zeros;
  zeros.c.assign(5, 0.0);
  zeros.rank = 1;
  zeros.var_h = 0.0;
  CHECK(var_empirical_cdf(CorrelationModel::ar1(0.5), zeros, 64) == 0.0);

  // O(n J) lag form vs the O(n^2) double sum at n = 512.
  for (const auto& model :
       {CorrelationModel::power_law(0.3), CorrelationModel::ar1(0.6),
        CorrelationModel::fgn_increments(0.8)}) {
    const std::int64_t n = 512;
    double brute = 0.0;
    for (std::int64_t i1 = 0; i1 < n; ++i1)
      for (std::int64_t i2 = 0; i2 < n; ++i2) {
        const std::int64_t k = i2 - i1;
        brute += (k == 0) ? coeffs.var_h : cross_moment(coeffs, model.rho(k));
      }
    brute /= static_cast<double>(n) * static_cast<double>(n);
    CHECK(var_empirical_cdf(model, coeffs, n) == doctest::Approx(brute).epsilon(1e-12));
  }

  // LRD scaling: doubling n multiplies the variance by ~2^{-alpha}.
  const auto lrd = CorrelationModel::power_law(0.3);
  const double v1 = var_empirical_cdf(lrd, coeffs, 1 << 14);
  const double v2 = var_empirical_cdf(lrd, coeffs, 1 << 15);
  CHECK(v2 / v1 == doctest::Approx(std::pow(2.0, -0.3)).epsilon(0.02));
  CHECK(v2 / v1 > 0.75);  // nothing like the iid 1/2
}

TEST_CASE("proof condition: normalized empirical-cdf variance stays bounded") {
  const auto identity = make_functional("identity");
  const double xi = true_quantile(identity, 0.5);
  const auto coeffs = coefficients_of_indicator(identity, xi, 20);
  const double f = pdf_gY(identity, xi);

  for (double alpha : {2.0, 1.0, 0.3}) {
    const auto model = CorrelationModel::power_law(alpha);
    const auto spec = classify_regime(alpha, coeffs.rank);
    double lo = 1e300, hi = 0.0;
    for (std::int64_t n = 1 << 12; n <= (1 << 16); n <<= 1) {
      const double r = rate_rn(spec, n);
      const double w = var_empirical_cdf(model, coeffs, n) / (r * r) / (f * f);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    CHECK(hi / lo < 3.0);
  }
}
