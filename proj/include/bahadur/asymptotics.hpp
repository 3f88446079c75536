#pragma once

#include <cstdint>
#include <string>

#include "bahadur/functionals.hpp"
#include "bahadur/gaussproc.hpp"
#include "bahadur/hermite.hpp"

namespace bahadur {

enum class Regime { Srd, Boundary, Lrd };
const char* regime_name(Regime r);

/// Dependence regime of the transformed sequence: SRD iff alpha*tau_bar > 1,
/// Boundary iff equal (within 1e-12), LRD iff below.
struct RateSpec {
  double alpha = 0.0;
  int tau_bar = 1;
  Regime regime = Regime::Srd;
};

RateSpec classify_regime(double alpha, int tau_bar);

/// Remainder rate r_n: n^{-1/2} (SRD), n^{-1/2} log(n)^{1/2} (boundary),
/// n^{-alpha tau_bar / 2} (LRD). Requires n >= 2.
double rate_rn(const RateSpec& spec, std::int64_t n);

/// sigma^2_p = (1/f^2) sum_{i in Z} sum_{j >= tau} c_j(p)^2/j! rho(i)^j,
/// truncated at |i| <= lag_cap. The lag-0 term is the exact Var h = p(1-p);
/// order truncation applies only to |i| >= 1 where the series is geometric.
/// tail_bound covers both the dropped lags and the dropped orders.
struct Sigma2Result {
  double value = 0.0;
  double tail_bound = 0.0;
};

Sigma2Result sigma2_p(const PiecewiseFunctional& g, double p, const CorrelationModel& model,
                      int max_order = 20, std::int64_t lag_cap = 100000);

/// K(tau, alpha) = sqrt( (1 - alpha tau/2)(1 - alpha tau)
///                       / (tau! (2 Gamma(alpha) sin(pi(1-alpha)/2))^tau) ),
/// defined for alpha*tau < 1.
double k_const(int tau, double alpha);

/// Var(F_hat_n(u) - F(u)) = (1/n^2) sum_{|k|<n} (n-|k|) C_h(k) with
/// C_h(k) = sum_j c_j^2/j! rho(k)^j, computed in O(n * max_order).
/// The k = 0 term uses the exact variance coeffs.var_h.
double var_empirical_cdf(const CorrelationModel& model, const HermiteCoefficients& coeffs,
                         std::int64_t n);

}  // namespace bahadur
