#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hedgekit/common.hpp"
#include "hedgekit/mc.hpp"
#include "hedgekit/samplers.hpp"

namespace hedgekit {

// Selection families whose strength parameter can be calibrated: theta is
// alpha >= 1 for BoN, lambda >= 0 for SBoN, mu >= 0 for BoP.
enum class HedgeMethod { BoN, SBoN, BoP };

// Shape of true reward as a function of selection strength over the swept
// range: rising/rising, rising/falling, falling/rising, falling/falling.
enum class Regime {
  monotonic_improvement,
  reward_hacking,
  reward_grokking,
  immediate_decline,
};

const char* method_name(HedgeMethod method);
const char* regime_name(Regime regime);
HedgeMethod parse_method(const std::string& text);

struct HedgeSpec {
  HedgeMethod method = HedgeMethod::BoN;
  // Subset size the deployed soft selector will use; SBoN residuals are
  // conditional covariances over subsets of this size.  <= 0 means "each
  // pool's own candidate count".
  std::int64_t sbon_n = 0;
};

// Calibration input: per-prompt pools whose quantiles are populated, plus
// the aligned true rewards at those quantile atoms.
struct HedgeData {
  std::vector<CandidatePool> pools;
  std::vector<std::vector<double>> true_by_quantile;

  // Copies each candidate's truth field into true_by_quantile.
  static HedgeData from_pools(std::vector<CandidatePool> pools);
  void validate() const;
};

struct CalibrationResult {
  HedgeMethod method = HedgeMethod::BoN;
  double theta_dagger = 0.0;
  std::vector<std::pair<double, double>> residual_trace;
  Regime regime = Regime::monotonic_improvement;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  std::int64_t mc_samples = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

// d/dtheta of the expected true reward under the selection policy, up to a
// positive factor.  BoN/BoP: per-pool self-normalized weighting of the
// quantile atoms, sum_k r_k psi(u_k, theta) w_k / sum_k w_k with
// w_k = p_theta(u_k); SBoN: Monte Carlo average over cfg.samples replicate
// subsets per pool of the softmax-conditional covariance of (truth, u).
// Mean and SE are taken across pools.  theta_ordinal separates the random
// streams of distinct evaluations: draws derive from
// (cfg.seed, pool index, theta_ordinal, replicate).
McEstimate residual(const HedgeSpec& spec, double theta,
                    const HedgeData& data, const McConfig& cfg,
                    std::uint64_t theta_ordinal = 0);

// Pool-averaged expected true reward under the policy at theta, same
// estimators and streams as residual.
McEstimate policy_value(const HedgeSpec& spec, double theta,
                        const HedgeData& data, const McConfig& cfg,
                        std::uint64_t theta_ordinal = 0);

// Bisects the residual on [low, high] when the endpoint residuals are of
// opposite sign beyond one standard error each; every evaluation lands in
// residual_trace.  Midpoints are split on the raw residual sign (the
// empirical residual is a definite function of the data) until the bracket
// is narrower than tol or 200 iterations pass.  converged requires the
// final residual to sit within max(tol, its SE); when noise degraded the
// mid-run sign information the final check fails and the result reports
// converged = false instead of throwing.  Without an initial sign change
// there is no interior root: the result carries the regime implied by the
// endpoint signs and theta_dagger is the bracket endpoint with the better
// policy_value, converged = false.
CalibrationResult find_threshold(const HedgeSpec& spec, const HedgeData& data,
                                 double low, double high, double tol,
                                 const McConfig& cfg);

// Maximizes f(n) = pool-averaged expected true reward of best-of-n over
// integers [1, n_max], where f uses exact order statistics of draws with
// replacement from the K atoms: the rank-k atom wins with probability
// (k/K)^n - ((k-1)/K)^n.  Ternary search (valid under unimodality) shrinks
// the range, a final linear scan resolves plateaus; ties break toward
// smaller n.  Returns (n_dagger, f(n_dagger)).
std::pair<std::int64_t, double> best_integer_n(const HedgeData& data,
                                               std::int64_t n_max);

// Classifies the reward-vs-strength shape from policy_value on the grid
// (>= 8 ascending points) by the signs of the first and last slopes.
// Slopes within one SE of zero inherit the nearest interior slope's sign;
// an entirely flat curve counts as monotonic_improvement.
Regime classify_regime(const HedgeData& data, const HedgeSpec& spec,
                       const std::vector<double>& theta_grid,
                       const McConfig& cfg);

struct RewardCurvePoint {
  double theta = 0.0;
  double true_mean = 0.0;
  double proxy_mean = 0.0;
  double kl = 0.0;
};

// One point per theta: data-weighted true mean, data-weighted quantile mean,
// and the policy's model KL (closed form for BoN/BoP, Monte Carlo for SBoN).
std::vector<RewardCurvePoint> reward_curve(const HedgeSpec& spec,
                                           const std::vector<double>& thetas,
                                           const HedgeData& data,
                                           const McConfig& cfg);

// Dense-quadrature twins for closed-form truths r_t(u): the residual is
// integral of r_t(u) psi(u, theta) p_theta(u) du, no data or sampling
// involved.  BoN and BoP only (the SBoN residual has no one-dimensional
// integral form).
double residual_exact(HedgeMethod method, double theta,
                      const std::function<double(double)>& truth);
double value_exact(HedgeMethod method, double theta,
                   const std::function<double(double)>& truth);
CalibrationResult find_threshold_exact(
    HedgeMethod method, const std::function<double(double)>& truth, double low,
    double high, double tol);
std::pair<std::int64_t, double> best_integer_n_exact(
    const std::function<double(double)>& truth, std::int64_t n_max);

}  // namespace hedgekit
