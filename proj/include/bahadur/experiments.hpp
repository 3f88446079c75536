#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bahadur/asymptotics.hpp"
#include "bahadur/gaussproc.hpp"
#include "bahadur/quantiles.hpp"

namespace bahadur {

/// A Monte-Carlo study: remainder statistics over an n-grid, M replicates
/// per n, substreams derived from (base_seed, n, replicate).
struct StudyConfig {
  CorrelationModel model = CorrelationModel::iid();
  std::string functional = "identity";
  double p = 0.5;
  std::vector<std::int64_t> n_grid;
  int replicates = 0;
  std::uint64_t base_seed = 0;
  int max_order = 20;

  // Execution details, deliberately excluded from the echoed configuration:
  // outputs must not depend on them.
  int threads = 1;
  std::string out_prefix;

  void validate() const;
  nlohmann::json to_json() const;
  static StudyConfig from_json(const nlohmann::json& j);
};

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q95 = 0.0;
};
SummaryStats summarize(std::span<const double> values);

struct PerNStats {
  std::int64_t n = 0;
  double rate = 0.0;          // r_n(alpha, tau_bar)
  SummaryStats remainder;     // signed R_n
  SummaryStats normalized;    // |R_n| / r_n
};

struct ReplicateRow {
  std::int64_t n = 0;
  int replicate = 0;
  QuantileObservation obs;
  double normalized = 0.0;    // |remainder| / r_n
};

struct BahadurStudyResult {
  StudyConfig config;
  std::string run_id;         // hash of the echoed configuration
  int tau_bar = 1;
  Regime regime = Regime::Srd;
  double alpha = 0.0;
  double xi = 0.0;            // true quantile
  double density = 0.0;       // f(xi)
  std::vector<PerNStats> per_n;
  std::vector<ReplicateRow> rows;  // ordered by (n, replicate)
  double sd_slope = 0.0;           // OLS slope of log SD(R_n) on log n
  double sd_slope_stderr = 0.0;
  std::optional<Sigma2Result> sigma2;  // SRD only
  std::optional<double> k_constant;    // LRD only

  std::string to_csv() const;
  nlohmann::json summary_json() const;
};

/// Runs the study. Deterministic given the config; independent of
/// config.threads. Writes <out_prefix>.csv and <out_prefix>.json when
/// out_prefix is set.
BahadurStudyResult run_bahadur_study(const StudyConfig& config);

/// Distributional check of the limit theorems. SRD: Kolmogorov-Smirnov
/// distance of sqrt(n)(xi_hat - xi)/sigma_p to N(0,1) at the largest grid n,
/// plus the empirical/theoretical variance ratio. LRD with tau_bar = 1:
/// fitted exponent of Var(xi_hat - xi) against n, compared to -alpha, plus a
/// KS distance of the studentized errors to a fitted Gaussian. Refuses the
/// boundary regime and LRD with tau_bar >= 2.
struct CltReport {
  StudyConfig config;
  Regime regime = Regime::Srd;
  int tau_bar = 1;
  double alpha = 0.0;
  std::int64_t n_used = 0;
  double ks_distance = 0.0;
  std::optional<double> variance_ratio;      // SRD
  std::optional<Sigma2Result> sigma2;        // SRD
  std::optional<double> exponent;            // LRD fit of log Var on log n
  std::optional<double> exponent_stderr;
  std::optional<double> exponent_target;     // -alpha * tau_bar

  nlohmann::json to_json() const;
};
CltReport run_clt_check(const StudyConfig& config);

/// OLS slope of log(values) on log(ns); returns (slope, stderr).
/// Requires >= 3 points, matching lengths, everything positive.
std::pair<double, double> fit_loglog_slope(std::span<const double> ns,
                                           std::span<const double> values);

/// One-sample Kolmogorov-Smirnov distance sup_x |F_hat(x) - Phi(x)|.
double ks_distance_to_standard_normal(std::vector<double> values);

}  // namespace bahadur
