#pragma once

#include <cmath>
#include <complex>

// Plain trapezoid sums used as independent references. For smooth, rapidly
// decaying integrands on a wide interval they converge spectrally.
namespace ref {

template <class F>
auto trapezoid(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  auto sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + i * h);
  return sum * h;
}

template <class F>
auto trapezoid2(F&& f, double a, double b, int n) {
  return trapezoid([&](double x) { return trapezoid([&](double y) { return f(x, y); }, a, b, n); }, a, b, n);
}

}  // namespace ref
