#include "bahadur/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bahadur/hermite.hpp"
#include "bahadur/normal.hpp"

namespace bahadur {

namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Dynamic dispatch over [0, count); fn(index, worker). Results must be
// written to preallocated per-index slots so scheduling cannot reorder them.
void parallel_for(int threads, std::int64_t count,
                  const std::function<void(std::int64_t, int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int id) {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i, id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

json stats_json(const SummaryStats& s) {
  return json{{"mean", s.mean}, {"sd", s.sd},   {"q05", s.q05},
              {"q50", s.q50},   {"q90", s.q90}, {"q95", s.q95}};
}

// Per-worker sampler cache: tasks are ordered n-major, so each worker
// rebuilds at most once per grid value.
struct SamplerSlot {
  std::int64_t n = -1;
  std::unique_ptr<CirculantSampler> sampler;
};

}  // namespace

void StudyConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("study config: p must be in (0,1)");
  if (n_grid.empty()) throw std::invalid_argument("study config: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 16) throw std::invalid_argument("study config: every n must be >= 16");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("study config: n grid must be strictly increasing");
  }
  if (replicates < 2) throw std::invalid_argument("study config: need at least 2 replicates");
  if (max_order < 1) throw std::invalid_argument("study config: max_order must be >= 1");
}

json StudyConfig::to_json() const {
  return json{{"corr", model.to_string()}, {"functional", functional},
              {"p", p},                    {"n_grid", n_grid},
              {"replicates", replicates},  {"base_seed", base_seed},
              {"max_order", max_order}};
}

StudyConfig StudyConfig::from_json(const json& j) {
  const json& src = j.contains("config") ? j.at("config") : j;
  StudyConfig cfg;
  cfg.model = CorrelationModel::parse(src.at("corr").get<std::string>());
  cfg.functional = src.at("functional").get<std::string>();
  cfg.p = src.at("p").get<double>();
  cfg.n_grid = src.at("n_grid").get<std::vector<std::int64_t>>();
  cfg.replicates = src.at("replicates").get<int>();
  cfg.base_seed = src.at("base_seed").get<std::uint64_t>();
  cfg.max_order = src.value("max_order", 20);
  return cfg;
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  const auto m = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  SummaryStats s;
  s.mean = mean;
  s.sd = values.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  s.q05 = sample_quantile(values, 0.05);
  s.q50 = sample_quantile(values, 0.50);
  s.q90 = sample_quantile(values, 0.90);
  s.q95 = sample_quantile(values, 0.95);
  return s;
}

BahadurStudyResult run_bahadur_study(const StudyConfig& config) {
  config.validate();
  const PiecewiseFunctional g = make_functional(config.functional);
  const QuantileContext ctx = make_quantile_context(g, config.p);

  BahadurStudyResult result;
  result.config = config;
  result.run_id = fnv1a_hex(config.to_json().dump());
  result.xi = ctx.xi;
  result.density = ctx.density;
  result.tau_bar = min_rank_neighborhood(g, config.p, default_rank_half_width(g, config.p), 21,
                                         config.max_order);
  result.alpha = config.model.decay_alpha();
  const RateSpec spec = classify_regime(result.alpha, result.tau_bar);
  result.regime = spec.regime;

  // The remainder rate uses the neighbourhood rank while the variance series
  // uses the expansion at xi(p); the harness requires the two to coincide.
  const HermiteCoefficients at_xi = coefficients_of_indicator(g, ctx.xi, config.max_order);
  if (at_xi.rank != result.tau_bar)
    throw std::domain_error("run_bahadur_study: Hermite rank at the quantile (" +
                            std::to_string(at_xi.rank) + ") differs from the neighbourhood rank (" +
                            std::to_string(result.tau_bar) + ")");

  const auto n_count = config.n_grid.size();
  const auto reps = static_cast<std::int64_t>(config.replicates);
  result.rows.resize(n_count * static_cast<std::size_t>(reps));

  const int threads = std::max(config.threads, 1);
  std::vector<SamplerSlot> slots(static_cast<std::size_t>(threads));
  std::vector<double> rates(n_count);
  for (std::size_t ni = 0; ni < n_count; ++ni) rates[ni] = rate_rn(spec, config.n_grid[ni]);

  parallel_for(threads, static_cast<std::int64_t>(n_count) * reps,
               [&](std::int64_t task, int worker) {
                 const auto ni = static_cast<std::size_t>(task / reps);
                 const auto m = static_cast<int>(task % reps);
                 const std::int64_t n = config.n_grid[ni];
                 SamplerSlot& slot = slots[static_cast<std::size_t>(worker)];
                 if (slot.n != n) {
                   slot.sampler = std::make_unique<CirculantSampler>(config.model, n);
                   slot.n = n;
                 }
                 const std::uint64_t seed =
                     substream_seed(config.base_seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(m));
                 const GaussianPath path = slot.sampler->draw(seed);
                 ReplicateRow& row = result.rows[static_cast<std::size_t>(task)];
                 row.n = n;
                 row.replicate = m;
                 row.obs = bahadur_remainder(path.values, g, config.p, ctx);
                 row.normalized = std::fabs(row.obs.remainder) / rates[ni];
               });

  std::vector<double> log_n, log_sd;
  for (std::size_t ni = 0; ni < n_count; ++ni) {
    std::vector<double> rem(static_cast<std::size_t>(reps)), norm(static_cast<std::size_t>(reps));
    for (std::int64_t m = 0; m < reps; ++m) {
      const auto& row = result.rows[ni * static_cast<std::size_t>(reps) +
                                    static_cast<std::size_t>(m)];
      rem[static_cast<std::size_t>(m)] = row.obs.remainder;
      norm[static_cast<std::size_t>(m)] = row.normalized;
    }
    PerNStats stats;
    stats.n = config.n_grid[ni];
    stats.rate = rates[ni];
    stats.remainder = summarize(rem);
    stats.normalized = summarize(norm);
    result.per_n.push_back(stats);
    log_n.push_back(static_cast<double>(stats.n));
    log_sd.push_back(stats.remainder.sd);
  }
  if (n_count >= 3) {
    const auto [slope, se] = fit_loglog_slope(log_n, log_sd);
    result.sd_slope = slope;
    result.sd_slope_stderr = se;
  }

  if (result.regime == Regime::Srd) {
    try {
      result.sigma2 = sigma2_p(g, config.p, config.model, config.max_order);
    } catch (const std::exception&) {
      result.sigma2.reset();
    }
  } else if (result.regime == Regime::Lrd) {
    try {
      result.k_constant = k_const(result.tau_bar, result.alpha);
    } catch (const std::exception&) {
      result.k_constant.reset();
    }
  }

  if (!config.out_prefix.empty()) {
    std::ofstream csv(config.out_prefix + ".csv", std::ios::binary);
    csv << result.to_csv();
    std::ofstream js(config.out_prefix + ".json", std::ios::binary);
    js << result.summary_json().dump(2) << "\n";
  }
  return result;
}

std::string BahadurStudyResult::to_csv() const {
  std::string out = "# config " + config.to_json().dump() + "\n";
  out += "run_id,n,replicate,xi_hat,F_hat_at_xi,linear_term,remainder,normalized_remainder\n";
  for (const auto& row : rows) {
    out += run_id;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.replicate);
    out += ',';
    out += fmt17(row.obs.xi_hat);
    out += ',';
    out += fmt17(row.obs.f_hat_at_xi);
    out += ',';
    out += fmt17(row.obs.linear_term);
    out += ',';
    out += fmt17(row.obs.remainder);
    out += ',';
    out += fmt17(row.normalized);
    out += '\n';
  }
  return out;
}

json BahadurStudyResult::summary_json() const {
  json per;
  for (const auto& s : per_n)
    per.push_back(json{{"n", s.n},
                       {"rate", s.rate},
                       {"remainder", stats_json(s.remainder)},
                       {"normalized_remainder", stats_json(s.normalized)}});
  json out{{"config", config.to_json()},
           {"run_id", run_id},
           {"tau_bar", tau_bar},
           {"regime", regime_name(regime)},
           {"alpha", std::isinf(alpha) ? json("inf") : json(alpha)},
           {"xi", xi},
           {"density", density},
           {"per_n", per},
           {"sd_slope", {{"value", sd_slope}, {"stderr", sd_slope_stderr}}}};
  if (sigma2)
    out["sigma2_p"] = json{{"value", sigma2->value}, {"tail_bound", sigma2->tail_bound}};
  if (k_constant) out["k_const"] = *k_constant;
  return out;
}

CltReport run_clt_check(const StudyConfig& config) {
  config.validate();
  const PiecewiseFunctional g = make_functional(config.functional);
  const QuantileContext ctx = make_quantile_context(g, config.p);
  const int tau_bar = min_rank_neighborhood(g, config.p, default_rank_half_width(g, config.p),
                                            21, config.max_order);
  const double alpha = config.model.decay_alpha();
  const RateSpec spec = classify_regime(alpha, tau_bar);
  if (spec.regime == Regime::Boundary)
    throw std::domain_error("run_clt_check: boundary regime has no limit statement");
  if (spec.regime == Regime::Lrd && tau_bar >= 2)
    throw std::domain_error(
        "run_clt_check: LRD limits with tau_bar >= 2 are non-Gaussian and out of scope");

  CltReport report;
  report.config = config;
  report.regime = spec.regime;
  report.tau_bar = tau_bar;
  report.alpha = alpha;
  report.n_used = config.n_grid.back();

  const auto reps = static_cast<std::int64_t>(config.replicates);
  const int threads = std::max(config.threads, 1);

  // Quantile errors xi_hat - xi per grid length; SRD needs the largest only.
  const std::vector<std::int64_t> grid =
      spec.regime == Regime::Srd ? std::vector<std::int64_t>{config.n_grid.back()} : config.n_grid;
  std::vector<std::vector<double>> errors(grid.size(),
                                          std::vector<double>(static_cast<std::size_t>(reps)));
  std::vector<SamplerSlot> slots(static_cast<std::size_t>(threads));
  parallel_for(threads, static_cast<std::int64_t>(grid.size()) * reps,
               [&](std::int64_t task, int worker) {
                 const auto ni = static_cast<std::size_t>(task / reps);
                 const auto m = static_cast<int>(task % reps);
                 const std::int64_t n = grid[ni];
                 SamplerSlot& slot = slots[static_cast<std::size_t>(worker)];
                 if (slot.n != n) {
                   slot.sampler = std::make_unique<CirculantSampler>(config.model, n);
                   slot.n = n;
                 }
                 const std::uint64_t seed =
                     substream_seed(config.base_seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(m));
                 const GaussianPath path = slot.sampler->draw(seed);
                 std::vector<double> z(path.values.size());
                 for (std::size_t i = 0; i < z.size(); ++i) z[i] = g(path.values[i]);
                 errors[ni][static_cast<std::size_t>(m)] =
                     sample_quantile_inplace(z, config.p) - ctx.xi;
               });

  if (spec.regime == Regime::Srd) {
    const Sigma2Result s2 = sigma2_p(g, config.p, config.model, config.max_order);
    report.sigma2 = s2;
    const double scale = std::sqrt(static_cast<double>(report.n_used) / s2.value);
    std::vector<double> standardized = errors.back();
    for (double& e : standardized) e *= scale;
    report.ks_distance = ks_distance_to_standard_normal(standardized);
    const SummaryStats st = summarize(standardized);
    report.variance_ratio = st.sd * st.sd;
  } else {
    std::vector<double> ns, variances;
    for (std::size_t ni = 0; ni < grid.size(); ++ni) {
      const SummaryStats st = summarize(errors[ni]);
      ns.push_back(static_cast<double>(grid[ni]));
      variances.push_back(st.sd * st.sd);
    }
    const auto [slope, se] = fit_loglog_slope(ns, variances);
    report.exponent = slope;
    report.exponent_stderr = se;
    report.exponent_target = -alpha * static_cast<double>(tau_bar);
    // Studentize against the fitted Gaussian at the largest n.
    const SummaryStats st = summarize(errors.back());
    std::vector<double> z = errors.back();
    for (double& e : z) e = (e - st.mean) / st.sd;
    report.ks_distance = ks_distance_to_standard_normal(z);
  }
  return report;
}

json CltReport::to_json() const {
  json out{{"config", config.to_json()},
           {"regime", regime_name(regime)},
           {"tau_bar", tau_bar},
           {"alpha", std::isinf(alpha) ? json("inf") : json(alpha)},
           {"n_used", n_used},
           {"ks_distance", ks_distance}};
  if (variance_ratio) out["variance_ratio"] = *variance_ratio;
  if (sigma2)
    out["sigma2_p"] = json{{"value", sigma2->value}, {"tail_bound", sigma2->tail_bound}};
  if (exponent) {
    out["variance_exponent"] = json{{"value", *exponent},
                                    {"stderr", exponent_stderr.value_or(0.0)},
                                    {"target", exponent_target.value_or(0.0)}};
  }
  return out;
}

std::pair<double, double> fit_loglog_slope(std::span<const double> ns,
                                           std::span<const double> values) {
  if (ns.size() != values.size())
    throw std::invalid_argument("fit_loglog_slope: length mismatch");
  if (ns.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
  const std::size_t m = ns.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(ns[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: inputs must be positive");
    x[i] = std::log(ns[i]);
    y[i] = std::log(values[i]);
  }
  double xb = 0.0, yb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xb += x[i];
    yb += y[i];
  }
  xb /= static_cast<double>(m);
  yb /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
  }
  const double slope = sxy / sxx;
  const double intercept = yb - slope * xb;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - intercept - slope * x[i];
    rss += e * e;
  }
  const double se = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  return {slope, se};
}

double ks_distance_to_standard_normal(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max(d, f - static_cast<double>(i) / m);
    d = std::max(d, static_cast<double>(i + 1) / m - f);
  }
  return d;
}

}  // namespace bahadur
