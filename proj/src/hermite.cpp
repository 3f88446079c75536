#include "bahadur/hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bahadur/normal.hpp"

namespace bahadur {

double hermite_eval(int degree, double t) {
  if (degree < 0) throw std::invalid_argument("hermite_eval: degree must be >= 0");
  if (degree == 0) return 1.0;
  double prev = 1.0, cur = t;
  for (int k = 1; k < degree; ++k) {
    const double next = t * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double phi_derivative(int order, double t) {
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite_eval(order, t) * normal_pdf(t);
}

namespace {

// Orthonormal Hermite values p_k = H_k / sqrt(k!) for k = 0..m at x; the
// normalized recurrence keeps magnitudes representable through m = 512.
void orthonormal_hermite(int m, double x, std::vector<double>& p) {
  p[0] = 1.0;
  if (m >= 1) p[1] = x;
  for (int k = 1; k < m; ++k)
    p[static_cast<std::size_t>(k) + 1] =
        (x * p[static_cast<std::size_t>(k)] -
         std::sqrt(static_cast<double>(k)) * p[static_cast<std::size_t>(k) - 1]) /
        std::sqrt(static_cast<double>(k) + 1.0);
}

}  // namespace

GaussHermiteRule gauss_hermite_rule(int m) {
  if (m < 1 || m > 512) throw std::invalid_argument("gauss_hermite_rule: need 1 <= m <= 512");
  // Golub-Welsch: eigenvalues of the Jacobi matrix (zero diagonal,
  // off-diagonal sqrt(k)) seed the nodes; Newton steps on the orthonormal
  // recurrence polish them to full precision, and the weights come from the
  // Christoffel function 1 / sum_{k<m} p_k(x)^2 (total mass 1).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite_rule: tridiagonal eigensolver failed");

  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  std::vector<double> p(static_cast<std::size_t>(m) + 1);
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) {
    double x = solver.eigenvalues()[i];
    for (int step = 0; step < 3; ++step) {
      orthonormal_hermite(m, x, p);
      const double dp = sqrt_m * p[static_cast<std::size_t>(m) - 1];
      if (dp == 0.0) break;
      const double delta = p[static_cast<std::size_t>(m)] / dp;
      x -= delta;
      if (std::fabs(delta) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    orthonormal_hermite(m, x, p);
    double christoffel = 0.0;
    for (int k = 0; k < m; ++k)
      christoffel += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / christoffel;
  }
  return rule;
}

double interval_hermite_coefficient(int j, double a, double b) {
  if (j < 0) throw std::invalid_argument("interval_hermite_coefficient: j must be >= 0");
  if (a > b) throw std::invalid_argument("interval_hermite_coefficient: need a <= b");
  if (j == 0) {
    const double fa = std::isinf(a) ? (a < 0 ? 0.0 : 1.0) : normal_cdf(a);
    const double fb = std::isinf(b) ? (b < 0 ? 0.0 : 1.0) : normal_cdf(b);
    return fb - fa;
  }
  // Antiderivative of H_j phi is -H_{j-1} phi; the Gaussian tail kills the
  // polynomial at +-infinity.
  const double ta = std::isinf(a) ? 0.0 : hermite_eval(j - 1, a) * normal_pdf(a);
  const double tb = std::isinf(b) ? 0.0 : hermite_eval(j - 1, b) * normal_pdf(b);
  return ta - tb;
}

double HermiteCoefficients::bessel_sum() const {
  double sum = 0.0, fact = 1.0;
  for (std::size_t j = 1; j < c.size(); ++j) {
    fact *= static_cast<double>(j);
    sum += c[j] * c[j] / fact;
  }
  return sum;
}

int hermite_rank(std::span<const double> coeffs, double zero_tol) {
  for (std::size_t j = 1; j < coeffs.size(); ++j)
    if (std::fabs(coeffs[j]) > zero_tol) return static_cast<int>(j);
  throw std::domain_error(
      "hermite_rank: all coefficients below tolerance up to the stored order");
}

HermiteCoefficients coefficients_of_indicator(const PiecewiseFunctional& g, double u,
                                              int max_order, double zero_tol) {
  if (max_order < 1) throw std::invalid_argument("coefficients_of_indicator: max_order >= 1");
  if (!(zero_tol > 0.0)) throw std::invalid_argument("coefficients_of_indicator: zero_tol > 0");

  const IntervalUnion set = sublevel_set(g, u);
  const double f_u = gaussian_measure(set);

  HermiteCoefficients out;
  out.u = u;
  out.zero_tol = zero_tol;
  out.var_h = f_u * (1.0 - f_u);
  out.c.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  // c_0 = E[h_u] = 0 by centering; the constant part of h_u drops out of
  // every higher coefficient because E[H_j] = 0 for j >= 1.
  for (int j = 1; j <= max_order; ++j) {
    double cj = 0.0;
    for (const auto& iv : set.parts) cj += interval_hermite_coefficient(j, iv.lo, iv.hi);
    out.c[static_cast<std::size_t>(j)] = cj;
  }
  out.rank = hermite_rank(out.c, zero_tol);
  return out;
}

std::vector<double> coefficients_by_quadrature(const std::function<double(double)>& f,
                                               int max_order, int nodes) {
  if (max_order < 0) throw std::invalid_argument("coefficients_by_quadrature: max_order >= 0");
  if (nodes < max_order + 1)
    throw std::invalid_argument("coefficients_by_quadrature: need nodes >= max_order + 1");
  const GaussHermiteRule rule = gauss_hermite_rule(nodes);
  std::vector<double> c(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int i = 0; i < nodes; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    const double wf = rule.weights[static_cast<std::size_t>(i)] * f(x);
    // Recurrence across orders at a fixed node.
    double prev = 1.0, cur = x;
    c[0] += wf;
    if (max_order >= 1) c[1] += wf * x;
    for (int j = 2; j <= max_order; ++j) {
      const double next = x * cur - static_cast<double>(j - 1) * prev;
      prev = cur;
      cur = next;
      c[static_cast<std::size_t>(j)] += wf * cur;
    }
  }
  return c;
}

int min_rank_neighborhood(const PiecewiseFunctional& g, double p, double half_width,
                          int grid_points, int max_order, double zero_tol) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("min_rank_neighborhood: half_width must be positive");
  if (grid_points < 3)
    throw std::invalid_argument("min_rank_neighborhood: need at least 3 grid points");
  const double xi = true_quantile(g, p);
  int best = std::numeric_limits<int>::max();
  for (int k = 0; k < grid_points; ++k) {
    const double u =
        xi - half_width + 2.0 * half_width * static_cast<double>(k) / (grid_points - 1);
    best = std::min(best, coefficients_of_indicator(g, u, max_order, zero_tol).rank);
  }
  return best;
}

double default_rank_half_width(const PiecewiseFunctional& g, double p) {
  const double dp = 0.01;
  const double plo = std::max(p - dp, 1e-6);
  const double phi_ = std::min(p + dp, 1.0 - 1e-6);
  return 0.05 * (true_quantile(g, phi_) - true_quantile(g, plo)) / 0.02;
}

double kappa(const PiecewiseFunctional& g, double p, int j) {
  if (j < 1) throw std::invalid_argument("kappa: j must be >= 1");
  const double xi = true_quantile(g, p);
  double acc = 0.0;
  bool contributed = false;
  for (const auto& b : g.branches) {
    if (!(xi > b.image_lo && xi < b.image_hi)) continue;
    const double x = b.inverse(xi);
    const double slope = std::fabs(b.derivative(x));
    if (!(slope > 0.0))
      throw std::domain_error("kappa: branch derivative of " + g.name +
                              " vanishes at a preimage of the quantile");
    acc += hermite_eval(j, x) * normal_pdf(x) / slope;
    contributed = true;
  }
  if (!contributed)
    throw std::domain_error("kappa: quantile not interior to any branch image of " + g.name);
  return 2.0 * acc;
}

double cross_moment(const HermiteCoefficients& coeffs, double rho) {
  if (std::fabs(rho) > 1.0) throw std::invalid_argument("cross_moment: need |rho| <= 1");
  double sum = 0.0, fact = 1.0, power = 1.0;
  for (int j = 1; j <= coeffs.max_order(); ++j) {
    fact *= static_cast<double>(j);
    power *= rho;
    if (j < coeffs.rank) continue;
    const double cj = coeffs.c[static_cast<std::size_t>(j)];
    sum += cj * cj / fact * power;
  }
  return sum;
}

}  // namespace bahadur
