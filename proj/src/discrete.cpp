#include "hedgekit/discrete.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "hedgekit/common.hpp"
#include "hedgekit/parallel.hpp"

namespace hedgekit {
namespace {

void check_theta(DiscreteKind kind, double theta) {
  if (kind == DiscreteKind::BoN) {
    if (!std::isfinite(theta) || theta < 1.0) {
      throw std::domain_error("discrete bon needs n >= 1");
    }
  } else {
    if (!std::isfinite(theta) || theta < 0.0) {
      throw std::domain_error("discrete bop needs mu >= 0");
    }
  }
}

// CDF map of the selection policy: z^n for BoN, z e^{mu(z-1)} for BoP.
double cdf_map(DiscreteKind kind, double theta, double z) {
  if (kind == DiscreteKind::BoN) {
    return std::pow(z, theta);
  }
  return z * std::exp(theta * (z - 1.0));
}

}  // namespace

DiscreteBase DiscreteBase::from_pmf(std::vector<double> pmf,
                                    std::vector<double> truths) {
  if (pmf.empty()) {
    throw data_error("pmf must be non-empty");
  }
  if (truths.size() != pmf.size()) {
    throw data_error("truths must match the pmf in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (!(pmf[i] > 0.0) || !std::isfinite(pmf[i])) {
      throw data_error("pmf entry " + std::to_string(i) +
                       " must be finite and > 0");
    }
    if (!(truths[i] >= 0.0) || !std::isfinite(truths[i])) {
      throw data_error("truth entry " + std::to_string(i) +
                       " must be finite and >= 0");
    }
    sum += pmf[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw data_error("pmf must sum to 1, got " + std::to_string(sum));
  }

  DiscreteBase base;
  base.cdf.resize(pmf.size());
  double running = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    running += pmf[i];
    base.cdf[i] = running;
  }
  // Accumulated rounding must not leak into the policy maps; the final CDF
  // value is 1 by definition.
  base.cdf.back() = 1.0;
  base.pmf = std::move(pmf);
  base.truths = std::move(truths);
  return base;
}

std::vector<double> discrete_policy_pmf(const DiscreteBase& base,
                                        DiscreteKind kind, double theta) {
  check_theta(kind, theta);
  // Identity strengths must reproduce the base bit-exactly, which the
  // float path cannot promise (pow and exp round).
  if ((kind == DiscreteKind::BoN && theta == 1.0) ||
      (kind == DiscreteKind::BoP && theta == 0.0)) {
    return base.pmf;
  }
  std::vector<double> out(base.pmf.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mapped = cdf_map(kind, theta, base.cdf[i]);
    out[i] = mapped - prev;
    prev = mapped;
  }
  return out;
}

MarginCheck check_tp2(const DiscreteBase& base, DiscreteKind kind,
                      double theta1, double theta2) {
  check_theta(kind, theta1);
  check_theta(kind, theta2);
  if (!(theta2 > theta1)) {
    throw std::domain_error("check_tp2 needs theta2 > theta1");
  }
  const std::vector<double> p1 = discrete_policy_pmf(base, kind, theta1);
  const std::vector<double> p2 = discrete_policy_pmf(base, kind, theta2);
  MarginCheck result;
  result.worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    for (std::size_t j = i + 1; j < p1.size(); ++j) {
      result.worst = std::min(result.worst, p1[i] * p2[j] - p1[j] * p2[i]);
    }
  }
  result.ok = result.worst > -1e-12;
  return result;
}

std::vector<std::pair<double, double>> discrete_reward_curve(
    const DiscreteBase& base, DiscreteKind kind,
    const std::vector<double>& theta_grid) {
  for (std::size_t i = 0; i + 1 < theta_grid.size(); ++i) {
    if (theta_grid[i] > theta_grid[i + 1]) {
      throw config_error("theta grid must be sorted ascending");
    }
  }
  std::vector<std::pair<double, double>> curve(theta_grid.size());
  parallel_for(theta_grid.size(), [&](std::size_t i) {
    const std::vector<double> pi =
        discrete_policy_pmf(base, kind, theta_grid[i]);
    double value = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
      value += pi[k] * base.truths[k];
    }
    curve[i] = {theta_grid[i], value};
  });
  return curve;
}

ExtremaCount count_extrema(const std::vector<double>& values) {
  ExtremaCount count;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) {
      ++count.maxima;
    } else if (values[i] < values[i - 1] && values[i] < values[i + 1]) {
      ++count.minima;
    }
  }
  return count;
}

std::pair<double, double> discrete_bop_kl(const DiscreteBase& base,
                                          double mu) {
  check_theta(DiscreteKind::BoP, mu);
  const std::vector<double> pi =
      discrete_policy_pmf(base, DiscreteKind::BoP, mu);
  double exact = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    exact += pi[i] * std::log(pi[i] / base.pmf[i]);
  }
  // Non-negative by Jensen; guard the sum against cancellation noise.
  if (exact < 0.0) exact = 0.0;

  // E[log N] - 1 + E[1/N] over N = 1 + Poisson(mu), truncated once the
  // remaining Poisson tail is below 1e-12.
  double bound = -1.0;
  double weight = std::exp(-mu);
  double cumulative = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    if (k > 0) weight *= mu / static_cast<double>(k);
    const auto n = static_cast<double>(k + 1);
    bound += weight * (std::log(n) + 1.0 / n);
    cumulative += weight;
    if (1.0 - cumulative < 1e-12) break;
  }
  return {exact, bound};
}

MarginCheck check_score_monotone(const DiscreteBase& base, DiscreteKind kind,
                                 double theta, double h) {
  check_theta(kind, theta);
  if (h <= 0.0) {
    h = 1e-5 * std::max(1.0, theta);
  }
  check_theta(kind, theta - h);  // interior requirement
  const std::vector<double> lo = discrete_policy_pmf(base, kind, theta - h);
  const std::vector<double> hi = discrete_policy_pmf(base, kind, theta + h);
  MarginCheck result;
  result.worst = std::numeric_limits<double>::infinity();
  double prev_score = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double score = (std::log(hi[i]) - std::log(lo[i])) / (2.0 * h);
    if (i > 0) {
      result.worst = std::min(result.worst, score - prev_score);
    }
    prev_score = score;
  }
  result.ok = result.worst > 0.0;
  return result;
}

}  // namespace hedgekit
