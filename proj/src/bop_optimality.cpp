#include "hedgekit/bop_optimality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hedgekit/common.hpp"
#include "hedgekit/parallel.hpp"
#include "hedgekit/policy.hpp"
#include "hedgekit/quadrature.hpp"

namespace hedgekit {
namespace {

double tilted_mean(double lambda) {
  return policy_mean(PolicySpec::tilted(lambda));
}

// ln(q_mu(u) / g_lambda(u)); the tilted normalizer is folded into a single
// log so lambda near zero stays exact.
double log_ratio(double mu, double lambda, double u) {
  return std::log1p(mu * u) + (mu - lambda) * (u - 1.0) +
         std::log(-std::expm1(-lambda) / lambda);
}

// d/du ln(q_mu/g_lambda) = mu/(mu u + 1) + mu - lambda, strictly decreasing
// in u, so the ratio has at most one interior critical point (a maximum).
double log_ratio_slope(double mu, double lambda, double u) {
  return mu / (mu * u + 1.0) + mu - lambda;
}

}  // namespace

MatchResult match_lambda(double mu, double tol) {
  if (!std::isfinite(mu) || mu <= 0.0) {
    throw std::domain_error("mu must be finite and > 0");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw config_error("tol must be > 0");
  }
  const double target = policy_mean(PolicySpec::bop(mu));

  double lo = 0.5 * mu;
  double hi = 2.0 * mu + 2.0;
  for (int i = 0; i < 200 && tilted_mean(lo) > target && lo > 1e-300; ++i) {
    lo *= 0.5;
  }
  for (int i = 0; i < 200 && tilted_mean(hi) < target; ++i) {
    hi *= 2.0;
  }

  double lambda = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    lambda = 0.5 * (lo + hi);
    const double diff = tilted_mean(lambda) - target;
    if (std::abs(diff) < tol) break;
    if (diff < 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }

  MatchResult out;
  out.mu = mu;
  out.lambda_star = lambda;
  out.mean = target;
  out.kl_bop = policy_kl(PolicySpec::bop(mu));
  out.kl_tilted = policy_kl(PolicySpec::tilted(lambda));
  out.kl_gap = out.kl_bop - out.kl_tilted;
  return out;
}

std::vector<MatchResult> kl_gap_sweep(const std::vector<double>& mu_grid) {
  if (mu_grid.empty()) {
    throw config_error("mu grid must be non-empty");
  }
  std::vector<MatchResult> results(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    results[i] = match_lambda(mu_grid[i], 1e-12);
  });

  // The closed-form gap must agree with the KL integral it stands for;
  // spot-check the sweep ends and middle.
  for (std::size_t i : {std::size_t{0}, mu_grid.size() / 2,
                        mu_grid.size() - 1}) {
    const MatchResult& m = results[i];
    const PolicySpec q = PolicySpec::bop(m.mu);
    const double direct =
        integrate(
            [&](double u) {
              return policy_density(q, u) *
                     log_ratio(m.mu, m.lambda_star, u);
            },
            0.0, 1.0, 1e-12)
            .value;
    if (std::abs(direct - m.kl_gap) > 1e-8) {
      throw std::runtime_error(
          "kl gap disagrees with direct quadrature at mu = " +
          std::to_string(m.mu));
    }
  }
  return results;
}

double sup_log_ratio_at(double mu, std::size_t u_resolution) {
  if (u_resolution < 2) {
    throw config_error("u_resolution must be >= 2");
  }
  const MatchResult m = match_lambda(mu, 1e-12);
  const double lambda = m.lambda_star;

  double best = std::max(log_ratio(mu, lambda, 0.0),
                         log_ratio(mu, lambda, 1.0));
  const auto n = static_cast<double>(u_resolution);
  double prev_u = 0.0;
  double prev_slope = log_ratio_slope(mu, lambda, 0.0);
  for (std::size_t i = 1; i <= u_resolution; ++i) {
    const double u = static_cast<double>(i) / n;
    const double slope = log_ratio_slope(mu, lambda, u);
    if (prev_slope > 0.0 && slope <= 0.0) {
      double a = prev_u, b = u;
      for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        if (log_ratio_slope(mu, lambda, mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      best = std::max(best, log_ratio(mu, lambda, 0.5 * (a + b)));
    }
    prev_u = u;
    prev_slope = slope;
  }
  return best;
}

double sup_log_ratio(const std::vector<double>& mu_grid,
                     std::size_t u_resolution) {
  if (mu_grid.size() < 50) {
    throw config_error("mu grid needs at least 50 points");
  }
  if (u_resolution < 1000) {
    throw config_error("u_resolution must be >= 1000");
  }
  std::vector<double> grid = mu_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.front() > 0.01 || grid.back() < 100.0) {
    throw config_error("mu grid must span at least [0.01, 100]");
  }

  std::vector<double> alphas(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    alphas[i] = sup_log_ratio_at(grid[i], u_resolution);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (alphas[i] > alphas[best]) best = i;
  }

  // The per-mu supremum varies smoothly; golden-section around the best
  // grid point recovers the true peak instead of clipping it to the grid.
  double lo = grid[best > 0 ? best - 1 : best];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = sup_log_ratio_at(x1, u_resolution);
  double f2 = sup_log_ratio_at(x2, u_resolution);
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = sup_log_ratio_at(x2, u_resolution);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = sup_log_ratio_at(x1, u_resolution);
    }
  }
  return std::max(alphas[best], std::max(f1, f2));
}

}  // namespace hedgekit
