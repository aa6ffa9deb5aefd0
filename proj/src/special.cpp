#include "hedgekit/special.hpp"

#include <cmath>
#include <stdexcept>

namespace hedgekit {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;
constexpr double kSeriesCutoff = 40.0;
constexpr double kZMin = 1e-8;

void check_domain(double z) {
  if (!std::isfinite(z) || z < kZMin) {
    throw std::domain_error("expi: z must be finite and >= 1e-8");
  }
}

// Power series for z <= 40; returns the sum and its error bound.
SpecialValue expi_series(double z) {
  double sum = kEulerGamma + std::log(z);
  double pow_term = 1.0;  // z^k / k!
  double term = 0.0;
  int k = 0;
  do {
    ++k;
    pow_term *= z / k;
    term = pow_term / k;
    sum += term;
  } while (term > 1e-16 * std::abs(sum) && k < 400);
  const double bound = term + (k + 4) * 2.3e-16 * std::abs(sum);
  return {sum, bound};
}

// Asymptotic series for e^{-z} Ei(z) = (1/z) sum_k k!/z^k, z > 40.
// Terms decrease until k ~ z; for z > 40 the minimum term is below double
// precision, so truncating at the first negligible (or growing) term is
// exact to working precision.
SpecialValue expi_scaled_asymptotic(double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * k / z;
    if (next >= term || next < 1e-17 * sum) {
      term = next;
      break;
    }
    term = next;
    sum += term;
  }
  const double value = sum / z;
  const double bound = (term / z) + 4.4e-16 * value;
  return {value, bound};
}

}  // namespace

SpecialValue expi(double z) {
  check_domain(z);
  if (z <= kSeriesCutoff) return expi_series(z);
  const SpecialValue scaled = expi_scaled_asymptotic(z);
  const double ez = std::exp(z);  // overflows past z ~ 709, as Ei itself does
  return {scaled.value * ez, scaled.abs_err_bound * ez};
}

SpecialValue expi_scaled(double z) {
  check_domain(z);
  if (z > kSeriesCutoff) return expi_scaled_asymptotic(z);
  const SpecialValue ei = expi_series(z);
  const double emz = std::exp(-z);
  return {ei.value * emz, ei.abs_err_bound * emz};
}

}  // namespace hedgekit
