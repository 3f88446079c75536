#pragma once

// Test-side oracles, kept independent of the library's computation paths:
// plain numerical integration, a second gamma implementation, and reference
// constants evaluated externally to 20 digits.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double phi(double t) {
  return 0.3989422804014326779 * std::exp(-0.5 * t * t);
}

// Probabilists' Hermite by recurrence (duplicated here on purpose).
inline double hermite(int j, double t) {
  if (j == 0) return 1.0;
  double prev = 1.0, cur = t;
  for (int k = 1; k < j; ++k) {
    const double next = t * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 2000) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGl16Nodes[16] = {
    -9.89400934991649939e-01, -9.44575023073232600e-01, -8.65631202387831755e-01,
    -7.55404408355002999e-01, -6.17876244402643771e-01, -4.58016777657227370e-01,
    -2.81603550779258915e-01, -9.50125098376374544e-02, 9.50125098376374544e-02,
    2.81603550779258915e-01,  4.58016777657227370e-01,  6.17876244402643771e-01,
    7.55404408355002999e-01,  8.65631202387831755e-01,  9.44575023073232600e-01,
    9.89400934991649939e-01};
inline constexpr double kGl16Weights[16] = {
    2.71524594117540374e-02, 6.22535239386477063e-02, 9.51585116824925914e-02,
    1.24628971255534030e-01, 1.49595988816576764e-01, 1.69156519395002619e-01,
    1.82603415044923612e-01, 1.89450610455068585e-01, 1.89450610455068585e-01,
    1.82603415044923612e-01, 1.69156519395002619e-01, 1.49595988816576764e-01,
    1.24628971255534030e-01, 9.51585116824925914e-02, 6.22535239386477063e-02,
    2.71524594117540374e-02};

// Composite 16-point Gauss-Legendre over unit-width panels; geometric
// convergence for entire integrands like H_j * phi.
inline double panel_gl16(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double mid = lo + 0.5 * width, hw = 0.5 * width;
    for (int i = 0; i < 16; ++i) total += hw * kGl16Weights[i] * f(mid + hw * kGl16Nodes[i]);
  }
  return total;
}

// Integral of H_j phi over [a, b] truncated at |t| = 12 (the Gaussian mass
// beyond is ~1e-32). Independent of the antiderivative identity used by the
// implementation.
inline double integral_hermite_phi(int j, double a, double b) {
  a = std::max(a, -12.0);
  b = std::min(b, 12.0);
  if (b <= a) return 0.0;
  return panel_gl16([j](double t) { return hermite(j, t) * phi(t); }, a, b);
}

// Lanczos gamma (g = 7, 9 terms): the dual implementation cross-checked
// against std::tgamma.
inline double lanczos_gamma(double x) {
  static const double coeff[9] = {0.99999999999980993,  676.5203681218851,
                                  -1259.1392167224028,  771.32342877765313,
                                  -176.61502916214059,  12.507343278686905,
                                  -0.13857109526572012, 9.9843695780195716e-6,
                                  1.5056327351493116e-7};
  if (x < 0.5)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  x -= 1.0;
  double a = coeff[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coeff[i] / (x + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

// Reference constants (20 significant digits, external evaluation).
inline constexpr double kPhi0 = 0.39894228040143267794;      // phi(0)
inline constexpr double kPhi1 = 0.24197072451914334980;      // phi(1)
inline constexpr double kZ075 = 0.67448975019608174320;      // Phi^{-1}(0.75)
inline constexpr double kZ0975 = 1.9599639845400542355;      // Phi^{-1}(0.975)
inline constexpr double kCdfSquareAt1 = 0.68268949213708589717;  // 2 Phi(1) - 1
inline constexpr double kPiHalf = 1.5707963267948966192;
inline constexpr double kKConst1Half = 0.38678592935955833995;  // K(1, 0.5)
inline constexpr double kRate03n1e4 = 0.25118864315095801111;   // 10^{-0.6}
inline constexpr double kFgnRho1H075 = 0.41421356237309504880;  // (2^1.5 - 2)/2
inline constexpr double kPsumPl1N10 = 0.48579365079365079365;   // (2 H_10 - 1)/10
inline constexpr double kBoundaryRateE2 = 0.52026009502288889636;  // e^{-1} sqrt(2)

}  // namespace oracle
