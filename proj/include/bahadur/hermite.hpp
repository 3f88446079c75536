#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bahadur/functionals.hpp"

namespace bahadur {

// Probabilists' convention throughout: H_0 = 1, H_1 = t,
// H_{j+1}(t) = t H_j(t) - j H_{j-1}(t), and E[H_j(Y) H_k(Y)] = j! delta_jk
// for standard Gaussian Y.

/// H_j(t) by the three-term recurrence.
double hermite_eval(int degree, double t);

/// k-th derivative of the Gaussian density: phi^(k)(t) = (-1)^k H_k(t) phi(t).
double phi_derivative(int order, double t);

/// Nodes and weights of the m-point Gauss-Hermite rule for the standard
/// Gaussian measure (weights sum to 1, exact for polynomials of degree
/// <= 2m-1). Golub-Welsch on the Jacobi matrix.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite_rule(int m);

/// Integral of H_j(t) phi(t) over [a, b], endpoints possibly infinite.
/// For j >= 1 this is H_{j-1}(a)phi(a) - H_{j-1}(b)phi(b) with the tail
/// convention H_{j-1}(+-inf)phi(+-inf) = 0; for j = 0 it is Phi(b) - Phi(a).
double interval_hermite_coefficient(int j, double a, double b);

/// Hermite expansion of the centered indicator h_u(t) = 1{g(t) <= u} - F(u).
struct HermiteCoefficients {
  double u = 0.0;               // expansion threshold
  std::vector<double> c;        // c_0..c_J, c[0] == 0 (h_u is centered)
  int rank = 0;                 // tau(u): smallest j >= 1 with |c_j| > zero_tol
  double zero_tol = 1e-10;
  double var_h = 0.0;           // Var h_u(Y) = F(u)(1 - F(u)), the full sum of c_j^2/j!

  int max_order() const { return static_cast<int>(c.size()) - 1; }
  /// Partial Bessel sum over the stored orders.
  double bessel_sum() const;
  /// Truncation mass beyond max_order: var_h minus the partial Bessel sum.
  double tail_mass() const { return var_h - bessel_sum(); }
};

/// Smallest j >= 1 with |coeffs[j]| > zero_tol (index = order; entry 0 is
/// ignored). Throws std::domain_error when every coefficient is below
/// tolerance up to the stored order.
int hermite_rank(std::span<const double> coeffs, double zero_tol);

/// Closed-form coefficients c_j(u) = E[h_u(Y) H_j(Y)], obtained by summing
/// interval_hermite_coefficient over sublevel_set(g, u). c_0 is forced to 0.
HermiteCoefficients coefficients_of_indicator(const PiecewiseFunctional& g, double u,
                                              int max_order, double zero_tol = 1e-10);

/// Gauss-Hermite estimate of c_j = E[f(Y) H_j(Y)] for j = 0..max_order.
/// Exact for polynomial f of degree <= 2m-1-max_order; discontinuous f
/// degrades to roughly the weight of one quadrature cell, so use large m
/// and generous tolerances when f is an indicator.
std::vector<double> coefficients_by_quadrature(const std::function<double(double)>& f,
                                               int max_order, int nodes);

/// Minimal detected rank of h_u over a symmetric grid of thresholds around
/// the p-quantile of g(Y): grid_points values spanning [xi - half_width,
/// xi + half_width].
int min_rank_neighborhood(const PiecewiseFunctional& g, double p, double half_width,
                          int grid_points, int max_order, double zero_tol = 1e-10);

/// Default neighbourhood half-width for min_rank_neighborhood:
/// 0.05 * (xi(p+0.01) - xi(p-0.01)) / 0.02.
double default_rank_half_width(const PiecewiseFunctional& g, double p);

/// Slab-limit constant: kappa_j = lim_{u->0} (1/u) * integral of H_j phi over
/// {t : |g(t) - xi(p)| <= u} = 2 sum_i H_j(x_i) phi(x_i) / |g'(x_i)| with
/// x_i the branch preimages of xi(p). Equivalently 2 (-1)^j sum_i
/// phi^(j)(x_i)/|g'(x_i)|. Throws std::domain_error when a contributing
/// branch derivative vanishes at its preimage.
double kappa(const PiecewiseFunctional& g, double p, int j);

/// Truncated cross-moment series sum_{j=rank..J} c_j^2/j! rho^j, the
/// covariance E[h_u(Y_1) h_u(Y_2)] of the transformed pair at correlation rho.
double cross_moment(const HermiteCoefficients& coeffs, double rho);

}  // namespace bahadur
