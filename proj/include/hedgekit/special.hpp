#pragma once

#include <cmath>

namespace hedgekit {

// Value plus a conservative bound on its absolute numerical error
// (truncation of the series plus rounding, scaled by |value|).
struct SpecialValue {
  double value = 0.0;
  double abs_err_bound = 0.0;
};

// Exponential integral Ei(z) for z > 0.
//
// z in [1e-8, 40]: power series Ei(z) = gamma + ln z + sum_k z^k / (k k!),
// truncated when a term drops below 1e-16 of the running sum.  All series
// terms are positive, so there is no cancellation and the relative error
// stays within a few ulp.
//
// z > 40: asymptotic series Ei(z) = e^z/z * sum_k k!/z^k, truncated at the
// first negligible term; at z = 40 the smallest term is already below
// double precision, so the switchover loses nothing.
//
// Throws std::domain_error for non-finite z or z < 1e-8 (Ei diverges to
// -infinity at 0+; values that close to the singularity are rejected rather
// than returned with useless error bounds).
SpecialValue expi(double z);

// e^{-z} Ei(z), computed without forming e^z.  Keeps the Poisson-policy KL
// formula finite for arbitrarily large rates, where Ei itself overflows.
SpecialValue expi_scaled(double z);

// ln(e^x - 1) without overflow for large x.
inline double log_expm1(double x) {
  return x > 1.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

}  // namespace hedgekit
