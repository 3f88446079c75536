#include "bahadur/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bahadur/normal.hpp"

namespace bahadur {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Where a branch puts u: strictly inside its image, at/above it, or at/below.
enum class Placement { Inside, Above, Below };

Placement place(const Branch& b, double u) {
  if (u > b.image_lo && u < b.image_hi) return Placement::Inside;
  return u >= b.image_hi ? Placement::Above : Placement::Below;
}

}  // namespace

PiecewiseFunctional make_functional(std::string_view name) {
  PiecewiseFunctional g;
  if (name == "identity") {
    g.name = "identity";
    g.eval = [](double t) { return t; };
    g.branches.push_back(Branch{
        {-kInf, kInf}, true, -kInf, kInf,
        [](double t) { return t; },
        [](double u) { return u; },
        [](double) { return 1.0; }});
  } else if (name == "abs") {
    g.name = "abs";
    g.eval = [](double t) { return std::fabs(t); };
    g.branches.push_back(Branch{
        {-kInf, 0.0}, false, 0.0, kInf,
        [](double t) { return -t; },
        [](double u) { return -u; },
        [](double) { return -1.0; }});
    g.branches.push_back(Branch{
        {0.0, kInf}, true, 0.0, kInf,
        [](double t) { return t; },
        [](double u) { return u; },
        [](double) { return 1.0; }});
  } else if (name == "square") {
    g.name = "square";
    g.eval = [](double t) { return t * t; };
    g.branches.push_back(Branch{
        {-kInf, 0.0}, false, 0.0, kInf,
        [](double t) { return t * t; },
        [](double u) { return -std::sqrt(u); },
        [](double t) { return 2.0 * t; }});
    g.branches.push_back(Branch{
        {0.0, kInf}, true, 0.0, kInf,
        [](double t) { return t * t; },
        [](double u) { return std::sqrt(u); },
        [](double t) { return 2.0 * t; }});
  } else if (name == "cube") {
    // (t+2)^3: a single increasing branch; the derivative vanishes only at
    // t = -2, i.e. at the quantile of order Phi(-2) ~ 0.023.
    g.name = "cube";
    g.eval = [](double t) { return std::pow(t + 2.0, 3.0); };
    g.branches.push_back(Branch{
        {-kInf, kInf}, true, -kInf, kInf,
        [](double t) { return std::pow(t + 2.0, 3.0); },
        [](double u) { return std::cbrt(u) - 2.0; },
        [](double t) { return 3.0 * (t + 2.0) * (t + 2.0); }});
  } else {
    throw std::invalid_argument("unknown functional: " + std::string(name));
  }
  return g;
}

std::vector<std::string> functional_names() { return {"identity", "abs", "square", "cube"}; }

IntervalUnion sublevel_set(const PiecewiseFunctional& g, double u) {
  std::vector<Interval> parts;
  bool any_inside = false, any_above = false, any_below = false;
  for (const auto& b : g.branches) {
    switch (place(b, u)) {
      case Placement::Above:
        any_above = true;
        parts.push_back({b.domain.lo, b.domain.hi, false, false});
        break;
      case Placement::Below:
        any_below = true;
        break;
      case Placement::Inside: {
        any_inside = true;
        const double x = b.inverse(u);
        if (b.increasing)
          parts.push_back({b.domain.lo, x, false, true});
        else
          parts.push_back({x, b.domain.hi, true, false});
        break;
      }
    }
  }
  if (!any_inside && any_above && any_below)
    throw std::domain_error("sublevel_set: threshold falls in a gap of the range of " + g.name);

  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion out;
  for (const auto& iv : parts) {
    if (!out.parts.empty() && iv.lo <= out.parts.back().hi) {
      out.parts.back().hi = std::max(out.parts.back().hi, iv.hi);
      out.parts.back().closed_hi = iv.closed_hi;
    } else {
      out.parts.push_back(iv);
    }
  }
  return out;
}

double gaussian_measure(const IntervalUnion& iu) {
  double total = 0.0;
  for (const auto& iv : iu.parts) {
    const double lo = std::isinf(iv.lo) ? 0.0 : normal_cdf(iv.lo);
    const double hi = std::isinf(iv.hi) ? 1.0 : normal_cdf(iv.hi);
    total += hi - lo;
  }
  return total;
}

double cdf_gY(const PiecewiseFunctional& g, double u) {
  // Branch-by-branch measure; unlike sublevel_set this never rejects, a
  // threshold in a range gap still has a well-defined CDF.
  double total = 0.0;
  for (const auto& b : g.branches) {
    const double dlo = std::isinf(b.domain.lo) ? 0.0 : normal_cdf(b.domain.lo);
    const double dhi = std::isinf(b.domain.hi) ? 1.0 : normal_cdf(b.domain.hi);
    switch (place(b, u)) {
      case Placement::Above:
        total += dhi - dlo;
        break;
      case Placement::Below:
        break;
      case Placement::Inside: {
        const double x = normal_cdf(b.inverse(u));
        total += b.increasing ? x - dlo : dhi - x;
        break;
      }
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

double pdf_gY(const PiecewiseFunctional& g, double u) {
  double density = 0.0;
  bool interior = false;
  for (const auto& b : g.branches) {
    if (place(b, u) != Placement::Inside) continue;
    interior = true;
    const double x = b.inverse(u);
    const double slope = std::fabs(b.derivative(x));
    if (!(slope > 0.0))
      throw std::domain_error("pdf_gY: derivative of " + g.name +
                              " vanishes at a preimage of the threshold");
    density += normal_pdf(x) / slope;
  }
  if (!interior)
    throw std::domain_error("pdf_gY: threshold not interior to the range of " + g.name);
  return density;
}

double true_quantile(const PiecewiseFunctional& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("true_quantile: p must be in (0,1)");

  double lo = -1.0, hi = 1.0;
  for (int i = 0; cdf_gY(g, lo) > p; ++i) {
    if (i > 200) throw std::domain_error("true_quantile: cannot bracket p from below");
    lo *= 2.0;
  }
  for (int i = 0; cdf_gY(g, hi) < p; ++i) {
    if (i > 200) throw std::domain_error("true_quantile: cannot bracket p from above");
    hi *= 2.0;
  }

  constexpr double kTol = 1e-12;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = cdf_gY(g, mid);
    if (std::fabs(fm - p) <= kTol) break;
    (fm < p ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * (1.0 + std::fabs(mid))) break;
  }
  // Newton polish with the density; stay inside the bracket.
  for (int i = 0; i < 4; ++i) {
    double f;
    try {
      f = pdf_gY(g, mid);
    } catch (const std::domain_error&) {
      break;
    }
    if (!(f > 0.0)) break;
    const double step = (cdf_gY(g, mid) - p) / f;
    const double next = mid - step;
    if (next <= lo || next >= hi) break;
    mid = next;
  }
  if (std::fabs(cdf_gY(g, mid) - p) > kTol)
    throw std::domain_error("true_quantile: distribution is flat at p (zero density)");
  return mid;
}

}  // namespace bahadur
