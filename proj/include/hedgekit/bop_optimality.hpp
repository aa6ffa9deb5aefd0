#pragma once

#include <cstddef>
#include <vector>

namespace hedgekit {

// Moment match between best-of-Poisson at mu and the exponentially tilted
// family: lambda_star is the unique tilt with the same mean, and the KL gap
// (how far BoP sits from the KL-optimal curve at that mean) collapses to
// kl_bop - kl_tilted because the tilted family is the information
// projection.
struct MatchResult {
  double mu = 0.0;
  double lambda_star = 0.0;
  double mean = 0.0;
  double kl_bop = 0.0;
  double kl_tilted = 0.0;
  double kl_gap = 0.0;
};

// Bisects on the tilted mean (strictly increasing in lambda, its derivative
// is the variance) until |tilted mean - BoP mean| < tol.  The initial
// bracket [mu/2, 2mu+2] is widened adaptively if it does not straddle the
// target.
MatchResult match_lambda(double mu, double tol);

// match_lambda over a grid, parallel across points.  Sanity-checks the gap
// at three grid points against direct quadrature of the KL integral.
std::vector<MatchResult> kl_gap_sweep(const std::vector<double>& mu_grid);

// Largest value of ln(q_mu / g_lambda_star) over u in [0, 1] for one mu:
// boundary values plus any interior critical point, the latter located by
// derivative sign changes on a u grid of u_resolution cells and refined by
// bisection.
double sup_log_ratio_at(double mu, std::size_t u_resolution);

// Maximum of sup_log_ratio_at over the mu grid (which must span at least
// [0.01, 100] with >= 50 points; u_resolution >= 1000), refined by a local
// search around the best grid point so the returned alpha is not clipped by
// grid spacing.  exp(alpha) bounds the density ratio, which in turn bounds
// the KL gap by phi(e^alpha) = alpha e^alpha - e^alpha + 1.
double sup_log_ratio(const std::vector<double>& mu_grid,
                     std::size_t u_resolution);

}  // namespace hedgekit
