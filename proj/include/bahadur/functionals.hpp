#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace bahadur {

/// One interval of the real line; endpoints may be +-infinity.
/// Endpoint closure is tracked for presentation only: every consumer
/// integrates against an atomless measure.
struct Interval {
  double lo;
  double hi;
  bool closed_lo = false;
  bool closed_hi = false;
};

/// Disjoint, ascending union of intervals, e.g. a sublevel set {t : g(t) <= u}.
struct IntervalUnion {
  std::vector<Interval> parts;

  bool empty() const { return parts.empty(); }
  std::size_t size() const { return parts.size(); }
  const Interval& operator[](std::size_t i) const { return parts[i]; }
};

/// A monotone C^1 piece of a functional: g restricted to the open interval
/// `domain`, with its inverse and derivative supplied in closed form.
struct Branch {
  Interval domain;       // open interval U_i
  bool increasing;       // direction of g on U_i
  double image_lo;       // open image g(U_i) = (image_lo, image_hi)
  double image_hi;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;     // defined on (image_lo, image_hi)
  std::function<double(double)> derivative;  // nonzero of constant sign on U_i
};

/// A nonlinear functional g assembled from monotone branches whose domains
/// cover the real line up to a null set.
struct PiecewiseFunctional {
  std::string name;
  std::vector<Branch> branches;
  std::function<double(double)> eval;  // agrees with branch forwards

  double operator()(double t) const { return eval(t); }
};

/// Bundled functionals: "identity", "abs" (|t|, two branches),
/// "square" (t^2, two branches), "cube" ((t+2)^3, one branch).
PiecewiseFunctional make_functional(std::string_view name);
std::vector<std::string> functional_names();

/// The set {t : g(t) <= u} as a union of intervals, one contribution per
/// branch. Empty or full-line results are valid; throws std::domain_error
/// when u falls in a gap of the range (some branches entirely below u,
/// others entirely above, none containing it).
IntervalUnion sublevel_set(const PiecewiseFunctional& g, double u);

/// Standard Gaussian measure of an interval union.
double gaussian_measure(const IntervalUnion& iu);

/// F(u) = P(g(Y) <= u) for standard Gaussian Y.
double cdf_gY(const PiecewiseFunctional& g, double u);

/// Density of g(Y): sum over branches of phi(g_i^{-1}(u)) / |g'(g_i^{-1}(u))|.
/// Throws std::domain_error when u is not interior to any branch image or a
/// contributing branch derivative vanishes there.
double pdf_gY(const PiecewiseFunctional& g, double u);

/// The p-quantile of g(Y): the root of F(xi) = p, bracketed then bisected and
/// Newton-polished until |F(xi) - p| <= 1e-12. Throws std::invalid_argument
/// for p outside (0,1), std::domain_error when F cannot bracket p or is flat
/// at the solution.
double true_quantile(const PiecewiseFunctional& g, double p);

}  // namespace bahadur
