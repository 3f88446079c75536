#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bahadur {

/// Correlation function rho(lag) of a stationary standard Gaussian sequence.
///
///   power law:      rho(i) = (1 + |i|)^{-alpha},   alpha > 0
///   fGn increments: rho(i) = ((|i|+1)^{2H} - 2|i|^{2H} + ||i|-1|^{2H}) / 2
///   iid:            rho(i) = 1{i == 0}
///   AR(1):          rho(i) = phi^{|i|},            |phi| < 1
class CorrelationModel {
 public:
  enum class Kind { PowerLaw, FgnIncrements, Iid, Ar1 };

  static CorrelationModel power_law(double alpha);
  static CorrelationModel fgn_increments(double hurst);
  static CorrelationModel iid();
  static CorrelationModel ar1(double phi);

  /// Parse "powerlaw:alpha=0.3", "fgn:H=0.85", "iid", "ar:phi=0.5".
  static CorrelationModel parse(const std::string& text);
  std::string to_string() const;

  double rho(std::int64_t lag) const;

  /// Exponent alpha of the power-law decay |rho(i)| ~ i^{-alpha}; +infinity
  /// for models whose correlations vanish or decay geometrically.
  double decay_alpha() const;

  Kind kind() const { return kind_; }
  double param() const { return param_; }

 private:
  CorrelationModel(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

double rho_eval(const CorrelationModel& model, std::int64_t lag);

/// Eigenvalues of the circulant extension of the Toeplitz covariance row
/// (rho(0), ..., rho(m-1)), m a power of two >= 2(n-1); the embedding size is
/// doubled until min eigenvalue >= -1e-8 * max eigenvalue, up to 2^10 * n.
/// Throws std::runtime_error when no acceptable embedding is found.
std::vector<double> embedding_spectrum(const CorrelationModel& model, std::int64_t n);

/// One exact-covariance draw of (Y_1, ..., Y_n).
struct GaussianPath {
  std::vector<double> values;
  CorrelationModel model;
  std::uint64_t seed = 0;
  double clipped_mass = 0.0;       // relative spectral mass clipped to 0
  std::size_t embedding_size = 0;  // circulant size m actually used

  std::int64_t n() const { return static_cast<std::int64_t>(values.size()); }
};

/// Reusable circulant sampler for repeated draws at a fixed (model, n):
/// the spectrum and FFT plan are built once. Not thread-safe; use one
/// instance per thread. draw(seed) is a pure function of its arguments.
class CirculantSampler {
 public:
  CirculantSampler(const CorrelationModel& model, std::int64_t n);
  ~CirculantSampler();
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  GaussianPath draw(std::uint64_t seed);

  std::int64_t n() const { return n_; }
  std::size_t embedding_size() const { return scale_.size(); }
  double clipped_mass() const { return clipped_mass_; }

 private:
  CorrelationModel model_;
  std::int64_t n_;
  std::vector<double> scale_;  // sqrt(max(lambda_k, 0) / m)
  double clipped_mass_;
  void* in_ = nullptr;   // fftw buffers and plan, opaque here
  void* out_ = nullptr;
  void* plan_ = nullptr;
};

/// Spectral draw via circulant embedding; deterministic given
/// (model, n, seed) regardless of threads or call order.
GaussianPath sample_path(const CorrelationModel& model, std::int64_t n, std::uint64_t seed);

/// Biased-normalization autocovariance r(k) = (1/n) sum_{i<=n-k} x_i x_{i+k},
/// no mean subtraction (the process is centered by construction).
std::vector<double> empirical_acf(std::span<const double> x, int max_lag);

/// (1/n) sum_{|i|<n} rho(i)^tau, the squared rate sequence of the transformed
/// process before the square root.
double partial_sum(const CorrelationModel& model, int tau, std::int64_t n);

/// splitmix64 step; the substream seed for replicate m at length n is the
/// documented mixing chain
///   s0 = mix(base); s1 = mix(s0 ^ 0x9E3779B97F4A7C15 * (n+1));
///   seed = mix(s1 ^ 0xC2B2AE3D27D4EB4F * (m+1)),
/// so grids extend without disturbing existing replicates.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t replicate);

/// Deterministic N(0,1) stream: mt19937_64 + Box-Muller pairs.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  void pair(double& z0, double& z1);
  double next();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bahadur
