#include "bahadur/gaussproc.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace bahadur {

namespace {

// fftw plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double ipow(double base, std::int64_t exp) {
  double result = 1.0, b = base;
  for (std::int64_t e = exp; e > 0; e >>= 1) {
    if (e & 1) result *= b;
    b *= b;
  }
  return result;
}

std::string format_param(double v) { return nlohmann::json(v).dump(); }

// Spectrum of the power-of-two circulant extension at a fixed size m.
std::vector<double> circulant_eigenvalues(const CorrelationModel& model, std::size_t m) {
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t lag = std::min(k, m - k);
    row[k] = model.rho(static_cast<std::int64_t>(lag));
  }
  std::vector<std::complex<double>> freq(m);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                      reinterpret_cast<fftw_complex*>(row.data()),
                                      reinterpret_cast<fftw_complex*>(freq.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  std::vector<double> lambda(m);
  for (std::size_t k = 0; k < m; ++k) lambda[k] = freq[k].real();
  return lambda;
}

constexpr double kEigTol = 1e-8;

std::vector<double> acceptable_spectrum(const CorrelationModel& model, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("embedding_spectrum: need n >= 2");
  std::size_t m = 2;
  while (m < 2 * static_cast<std::size_t>(n - 1)) m <<= 1;
  const std::size_t m_cap = static_cast<std::size_t>(n) << 10;
  for (;; m <<= 1) {
    std::vector<double> lambda = circulant_eigenvalues(model, m);
    double min_l = lambda[0], max_l = lambda[0];
    for (double l : lambda) {
      min_l = std::min(min_l, l);
      max_l = std::max(max_l, l);
    }
    if (min_l >= -kEigTol * max_l) return lambda;
    if (m > m_cap)
      throw std::runtime_error("embedding_spectrum: embedding not nonnegative-definite for " +
                               model.to_string());
  }
}

}  // namespace

CorrelationModel CorrelationModel::power_law(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("power_law: alpha must be positive");
  return {Kind::PowerLaw, alpha};
}

CorrelationModel CorrelationModel::fgn_increments(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("fgn_increments: H must be in (0,1)");
  return {Kind::FgnIncrements, hurst};
}

CorrelationModel CorrelationModel::iid() { return {Kind::Iid, 0.0}; }

CorrelationModel CorrelationModel::ar1(double phi) {
  if (!(std::fabs(phi) < 1.0)) throw std::invalid_argument("ar1: need |phi| < 1");
  return {Kind::Ar1, phi};
}

CorrelationModel CorrelationModel::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  double value = 0.0;
  bool has_value = false;
  if (colon != std::string::npos) {
    const std::string tail = text.substr(colon + 1);
    const auto eq = tail.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed correlation model: " + text);
    try {
      value = std::stod(tail.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed correlation model: " + text);
    }
    has_value = true;
  }
  if (head == "iid") {
    if (has_value) throw std::invalid_argument("iid takes no parameter: " + text);
    return iid();
  }
  if (head == "powerlaw") {
    if (!has_value) throw std::invalid_argument("powerlaw needs alpha=...: " + text);
    return power_law(value);
  }
  if (head == "fgn") {
    if (!has_value) throw std::invalid_argument("fgn needs H=...: " + text);
    return fgn_increments(value);
  }
  if (head == "ar") {
    if (!has_value) throw std::invalid_argument("ar needs phi=...: " + text);
    return ar1(value);
  }
  throw std::invalid_argument("unknown correlation model: " + text);
}

std::string CorrelationModel::to_string() const {
  switch (kind_) {
    case Kind::PowerLaw:
      return "powerlaw:alpha=" + format_param(param_);
    case Kind::FgnIncrements:
      return "fgn:H=" + format_param(param_);
    case Kind::Iid:
      return "iid";
    case Kind::Ar1:
      return "ar:phi=" + format_param(param_);
  }
  return "iid";
}

double CorrelationModel::rho(std::int64_t lag) const {
  const std::int64_t k = lag < 0 ? -lag : lag;
  switch (kind_) {
    case Kind::PowerLaw:
      return std::pow(1.0 + static_cast<double>(k), -param_);
    case Kind::FgnIncrements: {
      if (k == 0) return 1.0;
      const double h2 = 2.0 * param_;
      const double kk = static_cast<double>(k);
      return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
    }
    case Kind::Iid:
      return k == 0 ? 1.0 : 0.0;
    case Kind::Ar1:
      return ipow(param_, k);
  }
  return 0.0;
}

double CorrelationModel::decay_alpha() const {
  switch (kind_) {
    case Kind::PowerLaw:
      return param_;
    case Kind::FgnIncrements:
      // rho(i) ~ H(2H-1) i^{2H-2}; H = 1/2 degenerates to exact independence.
      if (param_ == 0.5) return std::numeric_limits<double>::infinity();
      return 2.0 - 2.0 * param_;
    case Kind::Iid:
    case Kind::Ar1:
      return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

double rho_eval(const CorrelationModel& model, std::int64_t lag) { return model.rho(lag); }

std::vector<double> embedding_spectrum(const CorrelationModel& model, std::int64_t n) {
  return acceptable_spectrum(model, n);
}

CirculantSampler::CirculantSampler(const CorrelationModel& model, std::int64_t n)
    : model_(model), n_(n), clipped_mass_(0.0) {
  std::vector<double> lambda = acceptable_spectrum(model, n);
  const std::size_t m = lambda.size();
  double clipped = 0.0, total = 0.0;
  scale_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    total += std::fabs(lambda[k]);
    if (lambda[k] < 0.0) {
      clipped += -lambda[k];
      lambda[k] = 0.0;
    }
    scale_[k] = std::sqrt(lambda[k] / static_cast<double>(m));
  }
  clipped_mass_ = total > 0.0 ? clipped / total : 0.0;

  std::lock_guard<std::mutex> lock(planner_mutex());
  in_ = fftw_alloc_complex(m);
  out_ = fftw_alloc_complex(m);
  plan_ = fftw_plan_dft_1d(static_cast<int>(m), static_cast<fftw_complex*>(in_),
                           static_cast<fftw_complex*>(out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

CirculantSampler::~CirculantSampler() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (in_ != nullptr) fftw_free(in_);
  if (out_ != nullptr) fftw_free(out_);
}

GaussianPath CirculantSampler::draw(std::uint64_t seed) {
  const std::size_t m = scale_.size();
  auto* in = static_cast<fftw_complex*>(in_);
  auto* out = static_cast<fftw_complex*>(out_);
  GaussianStream stream(seed);
  for (std::size_t k = 0; k < m; ++k) {
    double a, b;
    stream.pair(a, b);
    in[k][0] = scale_[k] * a;
    in[k][1] = scale_[k] * b;
  }
  fftw_execute(static_cast<fftw_plan>(plan_));

  GaussianPath path{.values = std::vector<double>(static_cast<std::size_t>(n_)),
                    .model = model_,
                    .seed = seed,
                    .clipped_mass = clipped_mass_,
                    .embedding_size = m};
  for (std::int64_t i = 0; i < n_; ++i) path.values[static_cast<std::size_t>(i)] = out[i][0];
  return path;
}

GaussianPath sample_path(const CorrelationModel& model, std::int64_t n, std::uint64_t seed) {
  CirculantSampler sampler(model, n);
  return sampler.draw(seed);
}

std::vector<double> empirical_acf(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
    throw std::invalid_argument("empirical_acf: need 0 <= max_lag < length");
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i)
      sum += x[i] * x[i + static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(k)] = sum / static_cast<double>(n);
  }
  return r;
}

double partial_sum(const CorrelationModel& model, int tau, std::int64_t n) {
  if (tau < 1) throw std::invalid_argument("partial_sum: tau must be >= 1");
  if (n < 1) throw std::invalid_argument("partial_sum: n must be >= 1");
  double sum = 1.0;  // i = 0, rho(0)^tau = 1
  for (std::int64_t i = 1; i < n; ++i) sum += 2.0 * ipow(model.rho(i), tau);
  return sum / static_cast<double>(n);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t replicate) {
  std::uint64_t s = base_seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ (0x9E3779B97F4A7C15ULL * (n + 1));
  h = splitmix64(s);
  s = h ^ (0xC2B2AE3D27D4EB4FULL * (replicate + 1));
  return splitmix64(s);
}

void GaussianStream::pair(double& z0, double& z1) {
  // Box-Muller on (0,1] uniforms built from the top 53 bits.
  const double u1 =
      (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(theta);
  z1 = r * std::sin(theta);
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double z0, z1;
  pair(z0, z1);
  spare_ = z1;
  have_spare_ = true;
  return z0;
}

}  // namespace bahadur
