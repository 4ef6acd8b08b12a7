#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <vector>

#include "csl/errors.hpp"

namespace csl::quad {

/// Tolerances for the adaptive rules. Convergence is declared when the
/// summed error estimate falls below max(abs_tol, rel_tol * |value|).
struct QuadratureSpec {
  double rel_tol = 1e-7;
  double abs_tol = 0.0;
  int max_subdivisions = 4000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1) {
      throw DomainError("QuadratureSpec: tolerances must be > 0 and max_subdivisions >= 1");
    }
  }
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> xgk{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> wgk{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525686838, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

/// One 21-point Gauss-Kronrod panel; the error is |Kronrod - Gauss|.
template <class T, class F>
Panel<T> gk21(F& f, double a, double b, long& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T kronrod = f(center) * wgk[10];
  T gauss{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * xgk[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += wgk[j] * sum;
    if (j % 2 == 1) gauss += wg[j / 2] * sum;
  }
  evals += 21;
  const T value = kronrod * half;
  const double err = magnitude(T((kronrod - gauss) * half));
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]. The
/// interval is first split at `breakpoints` (those strictly inside are used).
template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                        std::span<const double> breakpoints = {}) {
  using detail::magnitude;
  spec.validate();
  QuadResult<T> out;
  if (a == b) return out;

  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > std::min(a, b) && x < std::max(a, b)) cuts.push_back(x);
  }
  cuts.push_back(b);
  if (a < b) {
    std::sort(cuts.begin(), cuts.end());
  } else {
    std::sort(cuts.begin(), cuts.end(), std::greater<>());
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gk21<T>(f, cuts[i], cuts[i + 1], out.evaluations);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  int splits = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * magnitude(total))) {
    if (splits >= spec.max_subdivisions) {
      double value_mag = magnitude(total);
      throw QuadratureError("adaptive quadrature did not converge within " +
                                std::to_string(spec.max_subdivisions) + " subdivisions",
                            value_mag, total_err);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      throw QuadratureError("adaptive quadrature hit floating point resolution",
                            magnitude(total), total_err);
    }
    auto left = detail::gk21<T>(f, worst.a, mid, out.evaluations);
    auto right = detail::gk21<T>(f, mid, worst.b, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum from the panels to shed the rounding of the running updates.
  out.value = T{};
  out.error = 0.0;
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  return out;
}

/// Integral of f(t1, t2) over the triangle 0 <= t2 <= t1 <= t, written in
/// the variables s = t1 - t2 (outer) and u = t2 (inner). Integrands that
/// are stiff in t1 - t2 get resolved by the outer adaptive rule, helped by
/// `s_breakpoints`.
template <class T, class F>
QuadResult<T> integrate_triangle(F&& f, double t, const QuadratureSpec& spec,
                                 std::span<const double> s_breakpoints = {}) {
  QuadResult<T> out;
  double inner_err = 0.0;
  long inner_evals = 0;
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = spec.abs_tol * 0.1 / std::max(t, 1e-300);

  auto outer = [&](double s) -> T {
    const double len = t - s;
    if (len <= 0.0) return T{};
    auto r = integrate<T>([&](double u) { return f(s + u, u); }, 0.0, len, inner);
    inner_err += r.error;
    inner_evals += r.evaluations;
    return r.value;
  };
  auto r = integrate<T>(outer, 0.0, t, spec, s_breakpoints);
  out.value = r.value;
  // The inner errors were accumulated over every node, a crude upper bound
  // once scaled by the mean node weight.
  out.error = r.error + inner_err * t / std::max<long>(r.evaluations, 1);
  out.evaluations = inner_evals;
  return out;
}

}  // namespace csl::quad
