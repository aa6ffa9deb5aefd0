#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hedgekit {

// Finite-alphabet base distribution with per-item true rewards.  Items are
// ordered by proxy score, so the CDF plays the role the quantile does in
// the continuous policies.
struct DiscreteBase {
  std::vector<double> pmf;     // strictly positive, sums to 1
  std::vector<double> cdf;     // running sums, last forced to exactly 1
  std::vector<double> truths;  // non-negative, aligned with pmf

  // Validates and builds the cdf; truths must match pmf in length.
  static DiscreteBase from_pmf(std::vector<double> pmf,
                               std::vector<double> truths);
};

enum class DiscreteKind { BoN, BoP };

// Selection distribution over items: BoN maps the CDF through z^n (real
// exponent), BoP through z e^{mu(z-1)}; entries are consecutive
// differences.  n = 1 and mu = 0 return base.pmf bit-exactly.
std::vector<double> discrete_policy_pmf(const DiscreteBase& base,
                                        DiscreteKind kind, double theta);

struct MarginCheck {
  bool ok = false;
  // Smallest determinant (check_tp2) or smallest consecutive score gap
  // (check_score_monotone); +infinity when there are no pairs to check.
  double worst = 0.0;
};

// TP2 check across a strength increase: every 2x2 minor
// pi_1(i1) pi_2(i2) - pi_1(i2) pi_2(i1) over i1 < i2 must stay above
// -1e-12.  This is the likelihood-ratio-ordering property that forces the
// discrete reward curve to be unimodal.
MarginCheck check_tp2(const DiscreteBase& base, DiscreteKind kind,
                      double theta1, double theta2);

// Exact expected-truth curve over the strength grid (ascending).
std::vector<std::pair<double, double>> discrete_reward_curve(
    const DiscreteBase& base, DiscreteKind kind,
    const std::vector<double>& theta_grid);

struct ExtremaCount {
  std::size_t maxima = 0;
  std::size_t minima = 0;
};

// Strict interior local extrema of a sampled curve; companion check for the
// unimodality of discrete_reward_curve.
ExtremaCount count_extrema(const std::vector<double>& values);

// Exact KL of the discrete BoP policy from the base, plus the Poisson
// pool-size bound E[log N] - 1 + E[1/N] with N = 1 + Poisson(mu) (series
// truncated once the remaining tail mass is below 1e-12).
// Returns {exact_kl, upper_bound}.
std::pair<double, double> discrete_bop_kl(const DiscreteBase& base, double mu);

// Checks that the strength-score d/dtheta ln pi_theta(i), estimated by a
// central difference with step h (h <= 0 picks 1e-5 * max(1, theta)), is
// strictly increasing across items.  theta must be interior: theta - h
// stays in the policy's domain.
MarginCheck check_score_monotone(const DiscreteBase& base, DiscreteKind kind,
                                 double theta, double h = 0.0);

}  // namespace hedgekit
