#include "csl/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "csl/errors.hpp"

namespace csl::special {

namespace {

using cd = std::complex<double>;
constexpr int kTerms = 36;

struct WeidemanTable {
  double L;
  std::array<double, kTerms> coeff;  // highest power first

  WeidemanTable() {
    const int M = 2 * kTerms;
    const int M2 = 2 * M;
    L = std::sqrt(kTerms / std::numbers::sqrt2);
    // f on k = -M+1 .. M-1, prefixed by a zero, then fftshift'ed.
    std::array<double, 4 * kTerms> f{};
    for (int k = -M + 1; k <= M - 1; ++k) {
      const double t = L * std::tan(k * std::numbers::pi / M2);
      f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (L * L + t * t);
    }
    std::array<double, 4 * kTerms> shifted{};
    for (int i = 0; i < M2; ++i) shifted[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>((i + M2 / 2) % M2)];
    // Real part of the DFT, entries 1..N, reversed.
    for (int n = 1; n <= kTerms; ++n) {
      double re = 0.0;
      for (int j = 0; j < M2; ++j) re += shifted[static_cast<std::size_t>(j)] * std::cos(2.0 * std::numbers::pi * n * j / M2);
      coeff[static_cast<std::size_t>(kTerms - n)] = re / M2;
    }
  }
};

const WeidemanTable& table() {
  static const WeidemanTable t;
  return t;
}

cd faddeeva_upper(cd z) {
  const auto& tab = table();
  const cd iz{-z.imag(), z.real()};
  const cd denom = tab.L - iz;
  const cd Z = (tab.L + iz) / denom;
  cd p = 0.0;
  for (double a : tab.coeff) p = p * Z + a;
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

void require_decaying(cd a) {
  if (!(a.real() > 0.0)) throw ConvergenceError("Gaussian moment with Re(a) <= 0", a.real());
}

}  // namespace

cd faddeeva(cd z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

GaussianMoments negative_half_line_moments(cd a, cd b, cd c) {
  require_decaying(a);
  const cd sa = std::sqrt(a);
  const cd z = b / (2.0 * sa);
  const cd mu = b / (2.0 * a);
  const cd ec = std::exp(c);
  // m0 = sqrt(pi)/(2 sqrt a) * exp(z^2 + c) erfc(z), evaluated without
  // forming exp(z^2) and erfc(z) separately.
  cd scaled;
  if (z.real() >= 0.0) {
    scaled = ec * faddeeva(cd{-z.imag(), z.real()});  // w(i z)
  } else {
    scaled = 2.0 * std::exp(z * z + c) - ec * faddeeva(cd{z.imag(), -z.real()});  // w(-i z)
  }
  const cd m0 = std::sqrt(std::numbers::pi) / (2.0 * sa) * scaled;
  const cd m1 = mu * m0 - ec / (2.0 * a);
  const cd m2 = m0 * (mu * mu + 1.0 / (2.0 * a)) - mu * ec / (2.0 * a);
  return {m0, m1, m2};
}

GaussianMoments full_line_moments(cd a, cd b, cd c) {
  require_decaying(a);
  const cd mu = b / (2.0 * a);
  const cd m0 = std::sqrt(std::numbers::pi / a) * std::exp(b * b / (4.0 * a) + c);
  return {m0, mu * m0, m0 * (mu * mu + 1.0 / (2.0 * a))};
}

}  // namespace csl::special
