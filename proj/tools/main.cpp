// Command-line front end: simulation, Hermite/rate/variance analysis, and the
// Monte-Carlo studies. Machine-first output: JSON on stdout (use --pretty for
// humans), CSV only where a table is the natural shape. Exit codes: 0 success,
// 1 computation error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bahadur/asymptotics.hpp"
#include "bahadur/experiments.hpp"
#include "bahadur/functionals.hpp"
#include "bahadur/gaussproc.hpp"
#include "bahadur/hermite.hpp"

using nlohmann::json;

namespace {

bool g_pretty = false;

void emit(const json& j) { std::cout << (g_pretty ? j.dump(2) : j.dump()) << "\n"; }

int default_threads() {
  if (const char* env = std::getenv("BAHADUR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void require_probability(double p, const std::string& flag) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(flag + " must be a probability in (0,1)");
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      try {
        grid.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw std::invalid_argument("malformed n grid entry: " + item);
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (grid.empty()) throw std::invalid_argument("empty n grid");
  return grid;
}

struct StudyFlags {
  std::string config_path;
  std::string corr = "iid";
  std::string functional = "identity";
  double p = 0.5;
  std::string grid = "256,1024,4096";
  int replicates = 100;
  std::uint64_t seed = 0;
  int max_order = 20;
  std::string out;
  int threads = default_threads();
  bool csv = false;
};

void add_study_flags(CLI::App* cmd, StudyFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (or a summary JSON to re-run)");
  cmd->add_option("--corr", f.corr, "correlation model, e.g. powerlaw:alpha=0.3 | fgn:H=0.85 | iid | ar:phi=0.5");
  cmd->add_option("--functional", f.functional, "functional name: identity|abs|square|cube");
  cmd->add_option("--p", f.p, "quantile order in (0,1)");
  cmd->add_option("--n-grid", f.grid, "comma-separated strictly increasing sample sizes");
  cmd->add_option("--replicates", f.replicates, "Monte-Carlo replicates per n");
  cmd->add_option("--seed", f.seed, "base seed for the replicate substreams");
  cmd->add_option("--J", f.max_order, "Hermite expansion order");
  cmd->add_option("--out", f.out, "output path prefix (<out>.csv and <out>.json)");
  cmd->add_option("--threads", f.threads, "worker threads (output is independent of this)");
  cmd->add_flag("--csv", f.csv, "print the per-replicate table instead of the summary JSON");
}

bahadur::StudyConfig resolve_study(const CLI::App* cmd, const StudyFlags& f) {
  bahadur::StudyConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + f.config_path);
    json j;
    in >> j;
    cfg = bahadur::StudyConfig::from_json(j);
  }
  // Explicit flags supersede the config file.
  const bool fresh = f.config_path.empty();
  if (fresh || cmd->count("--corr")) cfg.model = bahadur::CorrelationModel::parse(f.corr);
  if (fresh || cmd->count("--functional")) cfg.functional = f.functional;
  if (fresh || cmd->count("--p")) cfg.p = f.p;
  if (fresh || cmd->count("--n-grid")) cfg.n_grid = parse_grid(f.grid);
  if (fresh || cmd->count("--replicates")) cfg.replicates = f.replicates;
  if (fresh || cmd->count("--seed")) cfg.base_seed = f.seed;
  if (fresh || cmd->count("--J")) cfg.max_order = f.max_order;
  cfg.threads = f.threads;
  cfg.out_prefix = f.out;
  require_probability(cfg.p, "--p");
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sample-quantile asymptotics for nonlinear functionals of correlated Gaussian sequences"};
  app.require_subcommand(1);
  app.add_flag("--pretty", g_pretty, "indent JSON output");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw one exact-covariance Gaussian path as CSV");
  std::string sim_corr = "iid", sim_out;
  std::int64_t sim_n = 1024;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--corr", sim_corr, "correlation model");
  simulate->add_option("--n", sim_n, "path length");
  simulate->add_option("--seed", sim_seed, "seed");
  simulate->add_option("--out", sim_out, "write CSV here instead of stdout");

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "Hermite coefficients of the centered indicator at the p-quantile");
  std::string co_functional = "identity";
  double co_p = 0.5;
  int co_order = 20;
  double co_tol = 1e-10;
  std::optional<double> co_u;
  coeffs->add_option("--functional", co_functional, "functional name");
  coeffs->add_option("--p", co_p, "quantile order (sets u = xi(p))");
  coeffs->add_option("--u", co_u, "explicit threshold u, overrides --p");
  coeffs->add_option("--J", co_order, "expansion order");
  coeffs->add_option("--zero-tol", co_tol, "rank detection tolerance");

  // rank
  auto* rank = app.add_subcommand("rank", "minimal Hermite rank near the p-quantile");
  std::string rk_functional = "identity";
  double rk_p = 0.5, rk_half_width = 0.0;
  int rk_points = 21, rk_order = 20;
  rank->add_option("--functional", rk_functional, "functional name");
  rank->add_option("--p", rk_p, "quantile order");
  rank->add_option("--half-width", rk_half_width, "grid half-width (default from the local quantile spacing)");
  rank->add_option("--grid-points", rk_points, "grid points (>= 3)");
  rank->add_option("--J", rk_order, "expansion order");

  // rate
  auto* rate = app.add_subcommand("rate", "remainder rate r_n and regime");
  double rt_alpha = 0.0;
  int rt_tau = 1;
  std::int64_t rt_n = 0;
  rate->add_option("--alpha", rt_alpha, "correlation decay exponent")->required();
  rate->add_option("--tau", rt_tau, "Hermite rank")->required();
  rate->add_option("--n", rt_n, "sample size")->required();

  // variance
  auto* variance = app.add_subcommand("variance", "limit variance sigma^2_p of the SRD CLT");
  std::string va_functional = "identity", va_corr = "iid";
  double va_p = 0.5;
  int va_order = 20;
  std::int64_t va_lag_cap = 100000;
  variance->add_option("--functional", va_functional, "functional name");
  variance->add_option("--p", va_p, "quantile order");
  variance->add_option("--corr", va_corr, "correlation model");
  variance->add_option("--J", va_order, "expansion order");
  variance->add_option("--lag-cap", va_lag_cap, "lag truncation");

  // kconst
  auto* kconst = app.add_subcommand("kconst", "normalizing constant K(tau, alpha) of the LRD limit");
  double kc_alpha = 0.0;
  int kc_tau = 1;
  kconst->add_option("--alpha", kc_alpha, "correlation decay exponent")->required();
  kconst->add_option("--tau", kc_tau, "Hermite rank")->required();

  // bahadur-study / clt-check
  auto* study = app.add_subcommand("bahadur-study", "Monte-Carlo remainder study over an n grid");
  StudyFlags study_flags;
  add_study_flags(study, study_flags);

  auto* clt = app.add_subcommand("clt-check", "distributional check of the limit theorems");
  StudyFlags clt_flags;
  add_study_flags(clt, clt_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(simulate)) {
      if (sim_n < 2) throw std::invalid_argument("n must be at least 2");
      const auto model = bahadur::CorrelationModel::parse(sim_corr);
      const auto path = bahadur::sample_path(model, sim_n, sim_seed);
      std::string csv = "# model=" + model.to_string() + " n=" + std::to_string(sim_n) +
                        " seed=" + std::to_string(sim_seed) + "\nvalue\n";
      char buf[40];
      for (double v : path.values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        csv += buf;
      }
      if (sim_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(sim_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + sim_out);
        out << csv;
      }
      return 0;
    }

    if (app.got_subcommand(coeffs)) {
      require_probability(co_p, "--p");
      if (co_order < 1) throw std::invalid_argument("J must be at least 1");
      if (!(co_tol > 0.0)) throw std::invalid_argument("zero-tol must be positive");
      const auto g = bahadur::make_functional(co_functional);
      const double u = co_u ? *co_u : bahadur::true_quantile(g, co_p);
      const auto c = bahadur::coefficients_of_indicator(g, u, co_order, co_tol);
      emit(json{{"config",
                 {{"functional", co_functional},
                  {"p", co_p},
                  {"u", u},
                  {"J", co_order},
                  {"zero_tol", co_tol}}},
                {"coefficients", c.c},
                {"rank", c.rank},
                {"var_h", c.var_h},
                {"tail_mass", c.tail_mass()}});
      return 0;
    }

    if (app.got_subcommand(rank)) {
      require_probability(rk_p, "--p");
      const auto g = bahadur::make_functional(rk_functional);
      const double hw =
          rk_half_width > 0.0 ? rk_half_width : bahadur::default_rank_half_width(g, rk_p);
      const int tau = bahadur::min_rank_neighborhood(g, rk_p, hw, rk_points, rk_order);
      emit(json{{"config",
                 {{"functional", rk_functional},
                  {"p", rk_p},
                  {"half_width", hw},
                  {"grid_points", rk_points},
                  {"J", rk_order}}},
                {"tau_bar", tau}});
      return 0;
    }

    if (app.got_subcommand(rate)) {
      if (!(rt_alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
      if (rt_tau < 1) throw std::invalid_argument("tau must be at least 1");
      if (rt_n < 2) throw std::invalid_argument("n must be at least 2");
      const auto spec = bahadur::classify_regime(rt_alpha, rt_tau);
      emit(json{{"config", {{"alpha", rt_alpha}, {"tau", rt_tau}, {"n", rt_n}}},
                {"regime", bahadur::regime_name(spec.regime)},
                {"value", bahadur::rate_rn(spec, rt_n)}});
      return 0;
    }

    if (app.got_subcommand(variance)) {
      require_probability(va_p, "--p");
      const auto g = bahadur::make_functional(va_functional);
      const auto model = bahadur::CorrelationModel::parse(va_corr);
      const auto result = bahadur::sigma2_p(g, va_p, model, va_order, va_lag_cap);
      const int tau = bahadur::min_rank_neighborhood(
          g, va_p, bahadur::default_rank_half_width(g, va_p), 21, va_order);
      emit(json{{"config",
                 {{"functional", va_functional},
                  {"p", va_p},
                  {"corr", model.to_string()},
                  {"J", va_order},
                  {"lag_cap", va_lag_cap}}},
                {"regime", bahadur::regime_name(
                               bahadur::classify_regime(model.decay_alpha(), tau).regime)},
                {"value", result.value},
                {"tail_bound", result.tail_bound}});
      return 0;
    }

    if (app.got_subcommand(kconst)) {
      if (!(kc_alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
      if (kc_tau < 1) throw std::invalid_argument("tau must be at least 1");
      emit(json{{"config", {{"alpha", kc_alpha}, {"tau", kc_tau}}},
                {"regime",
                 bahadur::regime_name(bahadur::classify_regime(kc_alpha, kc_tau).regime)},
                {"value", bahadur::k_const(kc_tau, kc_alpha)}});
      return 0;
    }

    if (app.got_subcommand(study)) {
      const auto cfg = resolve_study(study, study_flags);
      const auto result = bahadur::run_bahadur_study(cfg);
      if (study_flags.csv)
        std::cout << result.to_csv();
      else
        emit(result.summary_json());
      return 0;
    }

    if (app.got_subcommand(clt)) {
      const auto cfg = resolve_study(clt, clt_flags);
      const auto report = bahadur::run_clt_check(cfg);
      if (!cfg.out_prefix.empty()) {
        std::ofstream out(cfg.out_prefix + ".json", std::ios::binary);
        out << report.to_json().dump(2) << "\n";
      }
      emit(report.to_json());
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
