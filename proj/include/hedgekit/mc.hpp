#pragma once

#include <cstdint>

#include "hedgekit/common.hpp"

namespace hedgekit {

// Controls for the Monte Carlo estimators.  antithetic averages each
// replicate's statistic with its mirrored draw (u -> 1-u), which cuts the
// variance of monotone statistics at twice the per-replicate cost; samples
// always counts replicates.  A fixed seed gives the same uniform streams to
// every estimator (common random numbers across lambda values come free).
struct McConfig {
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

struct PolicyMoments {
  McEstimate mean;
  McEstimate kl;
};

// L(n, lambda) = E[log sum_i e^{lambda U_i}] over pools of n uniforms.
McEstimate log_partition(std::int64_t n, double lambda, const McConfig& cfg);

// Softmax-selection mean via the exact ratio identity
// sum_i U_i e^{lambda U_i} / sum_i e^{lambda U_i} (never finite differences)
// and KL via log n + lambda E - L.  The per-replicate KL term is the
// conditional KL of the realized pool, so it is non-negative pathwise.
PolicyMoments sbon_mean_kl(std::int64_t n, double lambda, const McConfig& cfg);

// Same with pool size 1 + Poisson(mu) drawn per replicate; the KL identity
// uses the realized pool size inside log n.
PolicyMoments sbop_mean_kl(double mu, double lambda, const McConfig& cfg);

// Draws pools of 1 + Poisson(mu) uniforms and takes the max (the sampling
// algorithm itself, no density involved in the mean); the KL statistic is
// ln q_mu at the sampled point.  Cross-checks the closed forms in policy.
PolicyMoments bop_mc_mean_kl(double mu, const McConfig& cfg);

// Serial reference implementations: identical per-replicate arithmetic and
// reduction order, plain loop instead of the OpenMP driver.  Kept so tests
// can assert the parallel kernels are bit-identical at any thread count,
// and for the benchmark baseline.
namespace reference {
McEstimate log_partition(std::int64_t n, double lambda, const McConfig& cfg);
PolicyMoments sbon_mean_kl(std::int64_t n, double lambda, const McConfig& cfg);
PolicyMoments sbop_mean_kl(double mu, double lambda, const McConfig& cfg);
PolicyMoments bop_mc_mean_kl(double mu, const McConfig& cfg);
}  // namespace reference

}  // namespace hedgekit
