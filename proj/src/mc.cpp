#include "hedgekit/mc.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hedgekit/parallel.hpp"
#include "hedgekit/rng.hpp"

namespace hedgekit {
namespace {

void check_config(const McConfig& cfg) {
  if (cfg.samples < 1) {
    throw config_error("mc samples must be >= 1");
  }
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::domain_error("lambda must be finite and >= 0");
  }
}

void check_n(std::int64_t n) {
  if (n < 1) {
    throw std::domain_error("pool size n must be >= 1");
  }
}

void check_mu(double mu) {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::domain_error("mu must be finite and >= 0");
  }
}

// Runs fn(i) for i in [0, samples).  The parallel driver writes into
// per-replicate slots (fn must only touch index i), so the serial fallback
// is the same loop without threads.
template <typename Fn>
void run_replicates(std::int64_t samples, bool parallel, Fn&& fn) {
  const auto count = static_cast<std::size_t>(samples);
  if (parallel) {
    parallel_for(count, fn);
  } else {
    for (std::size_t i = 0; i < count; ++i) fn(i);
  }
}

struct SoftStats {
  double mean;  // softmax-weighted pool mean
  double logz;  // log sum_i e^{lambda u_i}
};

// Max-shifted softmax statistics of one pool.  The stream is consumed twice
// (max pass, then accumulation pass) instead of buffering the pool; restart
// points are cheap stream copies.  With antithetic both the pool and its
// mirror share the same draws, and the caller averages the two halves.
struct PoolPass {
  double max_u = 0.0;
  double min_u = 0.0;
};

PoolPass pool_extrema(Stream s, std::uint64_t n) {
  double max_u = -1.0;
  double min_u = 2.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = s.next_open_unit();
    if (u > max_u) max_u = u;
    if (u < min_u) min_u = u;
  }
  return {max_u, min_u};
}

SoftStats soft_pool(Stream s, std::uint64_t n, double lambda, double shift,
                    bool mirror) {
  double sum_w = 0.0;
  double sum_uw = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    double u = s.next_open_unit();
    if (mirror) u = 1.0 - u;
    const double w = std::exp(lambda * (u - shift));
    sum_w += w;
    sum_uw += u * w;
  }
  return {sum_uw / sum_w, lambda * shift + std::log(sum_w)};
}

struct RepMoments {
  double mean;
  double kl;
};

// One softmax replicate over a pool of fixed size n.  kl_r uses the realized
// pool: ln n + lambda * mean_r - logz_r >= 0 pathwise (Jensen on the pool).
RepMoments soft_replicate(Stream s, std::uint64_t n, double lambda,
                          bool antithetic) {
  const PoolPass ex = pool_extrema(s, n);
  const SoftStats a = soft_pool(s, n, lambda, ex.max_u, false);
  const double log_n = std::log(static_cast<double>(n));
  double mean = a.mean;
  double kl = log_n + lambda * a.mean - a.logz;
  if (antithetic) {
    const SoftStats b = soft_pool(s, n, lambda, 1.0 - ex.min_u, true);
    mean = 0.5 * (mean + b.mean);
    kl = 0.5 * (kl + (log_n + lambda * b.mean - b.logz));
  }
  return {mean, kl};
}

// One max replicate (pool size drawn by the caller).  The mirrored maximum
// reuses the same draws: max_i (1 - u_i) = 1 - min_i u_i.
RepMoments max_replicate(Stream s, std::uint64_t n, double mu,
                         bool antithetic) {
  const PoolPass ex = pool_extrema(s, n);
  const auto log_q = [mu](double x) {
    return std::log1p(mu * x) + mu * (x - 1.0);
  };
  double mean = ex.max_u;
  double kl = log_q(ex.max_u);
  if (antithetic) {
    const double x2 = 1.0 - ex.min_u;
    mean = 0.5 * (mean + x2);
    kl = 0.5 * (kl + log_q(x2));
  }
  return {mean, kl};
}

McEstimate log_partition_impl(std::int64_t n, double lambda,
                              const McConfig& cfg, bool parallel) {
  check_config(cfg);
  check_n(n);
  check_lambda(lambda);
  std::vector<double> logz(static_cast<std::size_t>(cfg.samples));
  const auto un = static_cast<std::uint64_t>(n);
  run_replicates(cfg.samples, parallel, [&](std::size_t i) {
    Stream s = fork(cfg.seed, i);
    const PoolPass ex = pool_extrema(s, un);
    double z = soft_pool(s, un, lambda, ex.max_u, false).logz;
    if (cfg.antithetic) {
      z = 0.5 * (z + soft_pool(s, un, lambda, 1.0 - ex.min_u, true).logz);
    }
    logz[i] = z;
  });
  return mean_se(logz);
}

PolicyMoments sbon_mean_kl_impl(std::int64_t n, double lambda,
                                const McConfig& cfg, bool parallel) {
  check_config(cfg);
  check_n(n);
  check_lambda(lambda);
  std::vector<double> means(static_cast<std::size_t>(cfg.samples));
  std::vector<double> kls(static_cast<std::size_t>(cfg.samples));
  const auto un = static_cast<std::uint64_t>(n);
  run_replicates(cfg.samples, parallel, [&](std::size_t i) {
    const RepMoments r =
        soft_replicate(fork(cfg.seed, i), un, lambda, cfg.antithetic);
    means[i] = r.mean;
    kls[i] = r.kl;
  });
  return {mean_se(means), mean_se(kls)};
}

PolicyMoments sbop_mean_kl_impl(double mu, double lambda, const McConfig& cfg,
                                bool parallel) {
  check_config(cfg);
  check_mu(mu);
  check_lambda(lambda);
  std::vector<double> means(static_cast<std::size_t>(cfg.samples));
  std::vector<double> kls(static_cast<std::size_t>(cfg.samples));
  run_replicates(cfg.samples, parallel, [&](std::size_t i) {
    Stream s = fork(cfg.seed, i);
    // Realized pool size enters the per-replicate KL (log N term) and is
    // shared by both antithetic halves.
    const std::uint64_t n = 1 + s.next_poisson(mu);
    const RepMoments r = soft_replicate(s, n, lambda, cfg.antithetic);
    means[i] = r.mean;
    kls[i] = r.kl;
  });
  return {mean_se(means), mean_se(kls)};
}

PolicyMoments bop_mc_mean_kl_impl(double mu, const McConfig& cfg,
                                  bool parallel) {
  check_config(cfg);
  check_mu(mu);
  std::vector<double> means(static_cast<std::size_t>(cfg.samples));
  std::vector<double> kls(static_cast<std::size_t>(cfg.samples));
  run_replicates(cfg.samples, parallel, [&](std::size_t i) {
    Stream s = fork(cfg.seed, i);
    const std::uint64_t n = 1 + s.next_poisson(mu);
    const RepMoments r = max_replicate(s, n, mu, cfg.antithetic);
    means[i] = r.mean;
    kls[i] = r.kl;
  });
  return {mean_se(means), mean_se(kls)};
}

}  // namespace

McEstimate log_partition(std::int64_t n, double lambda, const McConfig& cfg) {
  return log_partition_impl(n, lambda, cfg, true);
}

PolicyMoments sbon_mean_kl(std::int64_t n, double lambda, const McConfig& cfg) {
  return sbon_mean_kl_impl(n, lambda, cfg, true);
}

PolicyMoments sbop_mean_kl(double mu, double lambda, const McConfig& cfg) {
  return sbop_mean_kl_impl(mu, lambda, cfg, true);
}

PolicyMoments bop_mc_mean_kl(double mu, const McConfig& cfg) {
  return bop_mc_mean_kl_impl(mu, cfg, true);
}

namespace reference {

McEstimate log_partition(std::int64_t n, double lambda, const McConfig& cfg) {
  return log_partition_impl(n, lambda, cfg, false);
}

PolicyMoments sbon_mean_kl(std::int64_t n, double lambda, const McConfig& cfg) {
  return sbon_mean_kl_impl(n, lambda, cfg, false);
}

PolicyMoments sbop_mean_kl(double mu, double lambda, const McConfig& cfg) {
  return sbop_mean_kl_impl(mu, lambda, cfg, false);
}

PolicyMoments bop_mc_mean_kl(double mu, const McConfig& cfg) {
  return bop_mc_mean_kl_impl(mu, cfg, false);
}

}  // namespace reference
}  // namespace hedgekit
