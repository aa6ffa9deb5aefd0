#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace hedgekit {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t evals = 0;
};

// Tanh-sinh (double-exponential) quadrature on (a, b).
//
// Nodes cluster double-exponentially toward the endpoints without ever
// touching them, so integrable endpoint singularities (ln u at 0, u^{a-1}
// for a >= 1) converge as fast as smooth integrands.  Node offsets from the
// endpoints are computed directly as d = 2/(1 + e^{2y}) to avoid the
// catastrophic cancellation of 1 - tanh(y); the same quantity gives the
// weight factor 1/cosh^2(y) = d(2 - d) with no overflow at any level.
//
// Levels halve the step until two successive sums agree to tol (relative
// above |value| = 1, absolute below).  Nodes whose offset underflows to the
// endpoint, or where f is non-finite, are skipped; their weights are far
// below double precision by then.
template <class F>
QuadResult integrate(F&& f, double a, double b, double tol = 1e-12) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  constexpr double kPiHalf = 1.5707963267948966;
  constexpr double kTMax = 6.5;

  std::size_t evals = 0;
  auto eval = [&](double u) -> double {
    if (u <= a || u >= b) return 0.0;
    const double v = f(u);
    ++evals;
    return std::isfinite(v) ? v : 0.0;
  };

  // g(t): weighted node pair at +-t.
  auto pair_term = [&](double t) -> double {
    const double y = kPiHalf * std::sinh(t);
    const double d = 2.0 / (1.0 + std::exp(2.0 * y));
    if (d <= 0.0) return 0.0;
    const double w = kPiHalf * std::cosh(t) * d * (2.0 - d);
    return w * (eval(a + hw * d) + eval(b - hw * d));
  };

  double h = 1.0;
  double sum = kPiHalf * eval(c);  // t = 0 node, weight pi/2
  for (double t = h;; t += h) {
    const double term = pair_term(t);
    sum += term;
    if (t > 3.0 && std::abs(term) <= std::abs(sum) * 1e-17) break;
    if (t >= kTMax) break;
  }

  double value = h * sum;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    double odd = 0.0;
    for (double t = h;; t += 2.0 * h) {
      const double term = pair_term(t);
      odd += term;
      if (t > 3.0 && std::abs(term) <= (std::abs(sum) + std::abs(odd)) * 1e-17) break;
      if (t >= kTMax) break;
    }
    sum = sum + odd;  // trapezoid refinement: T(h) = T(2h)/2 + h * odd
    const double next = h * sum;
    err = std::abs(next - value);
    value = next;
    if (level >= 2 && err <= tol * std::max(1.0, std::abs(value))) break;
  }
  return {value * hw, err * std::abs(hw), evals};
}

}  // namespace hedgekit
