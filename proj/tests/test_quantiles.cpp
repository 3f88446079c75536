#include "bahadur/quantiles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bahadur/gaussproc.hpp"
#include "support/oracles.hpp"

using namespace bahadur;

TEST_CASE("empirical_cdf counting") {
  const std::vector<double> s{1.0, 2.0, 3.0};
  CHECK(empirical_cdf(s, 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(empirical_cdf(s, 0.5) == 0.0);
  CHECK(empirical_cdf(s, 99.0) == 1.0);
  CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}, 0.0), std::invalid_argument);
}

TEST_CASE("sample_quantile order statistics") {
  CHECK(sample_quantile(std::vector<double>{3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(sample_quantile(std::vector<double>{5.0}, 0.123) == 5.0);
  CHECK(sample_quantile(std::vector<double>{5.0}, 0.987) == 5.0);
  CHECK(sample_quantile(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 0.25) == 1.0);
  CHECK_THROWS_AS(sample_quantile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sample_quantile(std::vector<double>{1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_quantile(std::vector<double>{1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("sample_quantile agrees with full sort") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_real_distribution<double> prob(0.001, 0.999);
  std::uniform_int_distribution<int> len(1, 60);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> sample(len(rng));
    for (auto& v : sample) v = val(rng);
    const double p = prob(rng);
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const auto k =
        static_cast<std::size_t>(std::ceil(static_cast<double>(sample.size()) * p - 1e-9));
    const double expected = sorted[std::max<std::size_t>(k, 1) - 1];
    CHECK(sample_quantile(sample, p) == expected);
  }
}

TEST_CASE("quantile / empirical-cdf coupling") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> sample(41);
    for (auto& v : sample) v = normal(rng);
    for (double p : {0.1, 0.5, 0.77}) {
      const double q = sample_quantile(sample, p);
      CHECK(empirical_cdf(sample, q) >= p - 1e-12);
      // Any strictly smaller sample point has F_hat < p.
      double below = -1e300;
      for (double v : sample)
        if (v < q) below = std::max(below, v);
      if (below > -1e300) CHECK(empirical_cdf(sample, below) < p);
    }
  }
}

TEST_CASE("translation equivariance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<double> sample(37);
  for (auto& v : sample) v = normal(rng);
  std::vector<double> shifted = sample;
  for (auto& v : shifted) v += 4.25;
  for (double p : {0.2, 0.5, 0.9})
    CHECK(sample_quantile(shifted, p) ==
          doctest::Approx(sample_quantile(sample, p) + 4.25).epsilon(1e-15));
}

TEST_CASE("bahadur_remainder hand-computed triple") {
  const auto identity = make_functional("identity");
  const std::vector<double> path{0.5, -1.0, 2.0};
  const auto obs = bahadur_remainder(path, identity, 0.5, make_quantile_context(identity, 0.5));
  CHECK(obs.n == 3);
  CHECK(obs.xi_hat == 0.5);                       // 2nd order statistic
  CHECK(obs.f_hat_at_xi == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const double linear = (0.5 - 1.0 / 3.0) / oracle::kPhi0;
  CHECK(obs.linear_term == doctest::Approx(linear).epsilon(1e-12));
  CHECK(obs.remainder == doctest::Approx(0.5 - linear).epsilon(1e-12));
  // The identity holds exactly by construction.
  CHECK(obs.remainder == obs.xi_hat - 0.0 - obs.linear_term);
}

TEST_CASE("bahadur_remainder when the empirical cdf hits p exactly") {
  const auto identity = make_functional("identity");
  const std::vector<double> path{-1.0, -0.5, 0.5, 1.0};
  const auto obs = bahadur_remainder(path, identity, 0.5, make_quantile_context(identity, 0.5));
  CHECK(obs.f_hat_at_xi == 0.5);
  CHECK(obs.linear_term == 0.0);
  CHECK(obs.remainder == obs.xi_hat);
  CHECK(obs.xi_hat == -0.5);
}

TEST_CASE("Bahadur cancellation shrinks the remainder below the raw error") {
  const auto identity = make_functional("identity");
  const auto ctx = make_quantile_context(identity, 0.5);
  const auto model = CorrelationModel::iid();
  const std::int64_t n = 1024;
  const int reps = 300;
  CirculantSampler sampler(model, n);
  std::vector<double> remainder(reps), raw(reps);
  for (int r = 0; r < reps; ++r) {
    const auto path = sampler.draw(substream_seed(31, static_cast<std::uint64_t>(n), r));
    const auto obs = bahadur_remainder(path.values, identity, 0.5, ctx);
    remainder[r] = obs.remainder;
    raw[r] = obs.xi_hat - ctx.xi;
  }
  auto sd = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
  };
  CHECK(sd(remainder) < sd(raw));
  CHECK(sd(remainder) < 0.5 * sd(raw));
}
