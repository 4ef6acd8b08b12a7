#pragma once

#include <complex>

namespace csl::special {

/// Faddeeva function w(z) = exp(-z^2) erfc(-i z), Weideman's rational
/// expansion with 36 terms (about 1e-13 relative accuracy).
std::complex<double> faddeeva(std::complex<double> z);

/// Moments of exp(-a p^2 + b p + c) over a half line or the full line,
/// for Re a > 0.
struct GaussianMoments {
  std::complex<double> m0;
  std::complex<double> m1;
  std::complex<double> m2;
};

/// Integrals of p^k exp(-a p^2 + b p + c) over (-inf, 0], k = 0, 1, 2.
GaussianMoments negative_half_line_moments(std::complex<double> a, std::complex<double> b,
                                           std::complex<double> c);
/// Same over the whole real line.
GaussianMoments full_line_moments(std::complex<double> a, std::complex<double> b, std::complex<double> c);

}  // namespace csl::special
