#include "hedgekit/hedgetune.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hedgekit/parallel.hpp"
#include "hedgekit/policy.hpp"
#include "hedgekit/quadrature.hpp"
#include "hedgekit/rng.hpp"

namespace hedgekit {
namespace {

void check_theta(HedgeMethod method, double theta) {
  const double floor = method == HedgeMethod::BoN ? 1.0 : 0.0;
  if (!std::isfinite(theta) || theta < floor) {
    throw std::domain_error(std::string(method_name(method)) +
                            " theta out of domain");
  }
}

void check_samples(const McConfig& cfg) {
  if (cfg.samples < 1) {
    throw config_error("mc samples must be >= 1");
  }
}

PolicySpec hard_spec(HedgeMethod method, double theta) {
  return method == HedgeMethod::BoN ? PolicySpec::bon(theta)
                                    : PolicySpec::bop(theta);
}

struct PoolStats {
  double value_r = 0.0;  // expected truth under the policy
  double value_u = 0.0;  // expected quantile under the policy
  double resid = 0.0;    // expected truth * score (the residual integrand)
};

// Self-normalized importance weighting of the pool's quantile atoms under
// the hard policy's density; the weights are max-shifted in log space so
// large theta cannot overflow.
PoolStats atom_stats(const std::vector<double>& u, const std::vector<double>& r,
                     const PolicySpec& ps) {
  double shift = -HUGE_VAL;
  for (double uk : u) {
    shift = std::max(shift, policy_log_density(ps, uk));
  }
  double den = 0.0, num_r = 0.0, num_u = 0.0, num_s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double w = std::exp(policy_log_density(ps, u[k]) - shift);
    den += w;
    num_r += r[k] * w;
    num_u += u[k] * w;
    num_s += r[k] * score(ps, u[k]) * w;
  }
  return {num_r / den, num_u / den, num_s / den};
}

// Monte Carlo over subsets of the pool's atoms: each replicate draws n
// indices uniformly with replacement, weights them by the softmax over
// quantiles, and records the conditional mean of truth/quantile and the
// conditional covariance of (truth, quantile).  That covariance is the
// lambda-derivative of the softmax-conditional truth mean, so its average
// is the SBoN residual.
PoolStats sbon_pool_stats(std::size_t pool_idx, const std::vector<double>& u,
                          const std::vector<double>& r, std::int64_t sbon_n,
                          double lambda, const McConfig& cfg,
                          std::uint64_t ordinal) {
  const std::size_t pool_size = u.size();
  const std::size_t n = sbon_n > 0 ? static_cast<std::size_t>(sbon_n)
                                   : pool_size;
  const auto reps = static_cast<std::size_t>(cfg.samples);
  std::vector<std::size_t> subset(n);
  double acc_r = 0.0, acc_u = 0.0, acc_cov = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    Stream s = fork(cfg.seed, pool_idx, ordinal, rep);
    double max_u = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) {
      subset[i] = static_cast<std::size_t>(s.next_index(pool_size));
      max_u = std::max(max_u, u[subset[i]]);
    }
    double den = 0.0, su = 0.0, sr = 0.0, sur = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double uk = u[subset[i]];
      const double rk = r[subset[i]];
      const double w = std::exp(lambda * (uk - max_u));
      den += w;
      su += uk * w;
      sr += rk * w;
      sur += uk * rk * w;
    }
    const double mean_u = su / den;
    const double mean_r = sr / den;
    acc_r += mean_r;
    acc_u += mean_u;
    acc_cov += sur / den - mean_u * mean_r;
  }
  const auto d = static_cast<double>(reps);
  return {acc_r / d, acc_u / d, acc_cov / d};
}

struct PoolBuffers {
  std::vector<double> value_r;
  std::vector<double> value_u;
  std::vector<double> resid;
};

PoolBuffers compute_pools(const HedgeSpec& spec, double theta,
                          const HedgeData& data, const McConfig& cfg,
                          std::uint64_t ordinal) {
  data.validate();
  check_theta(spec.method, theta);
  const std::size_t pools = data.pools.size();
  PoolBuffers out{std::vector<double>(pools), std::vector<double>(pools),
                  std::vector<double>(pools)};
  if (spec.method == HedgeMethod::SBoN) {
    check_samples(cfg);
    parallel_for(pools, [&](std::size_t i) {
      const PoolStats st =
          sbon_pool_stats(i, data.pools[i].quantiles, data.true_by_quantile[i],
                          spec.sbon_n, theta, cfg, ordinal);
      out.value_r[i] = st.value_r;
      out.value_u[i] = st.value_u;
      out.resid[i] = st.resid;
    });
  } else {
    const PolicySpec ps = hard_spec(spec.method, theta);
    parallel_for(pools, [&](std::size_t i) {
      const PoolStats st =
          atom_stats(data.pools[i].quantiles, data.true_by_quantile[i], ps);
      out.value_r[i] = st.value_r;
      out.value_u[i] = st.value_u;
      out.resid[i] = st.resid;
    });
  }
  return out;
}

int sign_with_deadband(const McEstimate& e) {
  if (e.mean > e.se) return 1;
  if (e.mean < -e.se) return -1;
  return 0;
}

Regime regime_from_endpoint_signs(int lo, int hi) {
  if (lo == 0 && hi == 0) return Regime::monotonic_improvement;
  if (lo == 0) lo = hi;
  if (hi == 0) hi = lo;
  if (lo > 0 && hi > 0) return Regime::monotonic_improvement;
  if (lo < 0 && hi < 0) return Regime::immediate_decline;
  if (lo < 0 && hi > 0) return Regime::reward_grokking;
  return Regime::reward_hacking;
}

// Shared bisection driver: eval_residual(theta, ordinal) appends nothing
// itself, the driver records the trace; eval_value feeds the boundary
// argmax fallback when the bracket holds no root.
CalibrationResult threshold_impl(
    HedgeMethod method,
    const std::function<McEstimate(double, std::uint64_t)>& eval_residual,
    const std::function<double(double, std::uint64_t)>& eval_value, double low,
    double high, double tol, std::int64_t mc_samples, std::uint64_t seed) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw config_error("tol must be > 0");
  }
  if (!(low < high)) {
    throw config_error("bracket must satisfy low < high");
  }
  check_theta(method, low);
  check_theta(method, high);

  CalibrationResult out;
  out.method = method;
  out.bracket_low = low;
  out.bracket_high = high;
  out.mc_samples = mc_samples;
  out.seed = seed;

  const auto eval = [&](double theta) {
    const McEstimate e =
        eval_residual(theta, out.residual_trace.size());
    out.residual_trace.emplace_back(theta, e.mean);
    return e;
  };

  const McEstimate e_lo = eval(low);
  const McEstimate e_hi = eval(high);
  const int s_lo = sign_with_deadband(e_lo);
  const int s_hi = sign_with_deadband(e_hi);

  if (s_lo == 1 && s_hi == -1) {
    // Rising-then-falling truth curve: the root of the residual is the
    // hacking threshold.
    out.regime = Regime::reward_hacking;
    double lo = low, hi = high;
    for (int it = 0; it < 200 && hi - lo >= tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      const McEstimate e = eval(mid);
      if (e.mean == 0.0) {
        out.theta_dagger = mid;
        out.converged = true;
        return out;
      }
      // Midpoints move on the raw sign: the estimate is the empirical
      // residual of this dataset, and its root is what we refine.  The SE
      // only gates the endpoint pattern and the final credibility check.
      if (e.mean > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.theta_dagger = 0.5 * (lo + hi);
    const McEstimate final_e = eval(out.theta_dagger);
    out.converged = hi - lo < tol &&
                    std::abs(final_e.mean) <= std::max(tol, final_e.se);
    return out;
  }

  // No sign change in the bracket: report the regime the endpoint signs
  // imply and the endpoint with the better expected truth.
  out.regime = regime_from_endpoint_signs(s_lo, s_hi);
  const double v_lo = eval_value(low, out.residual_trace.size());
  const double v_hi = eval_value(high, out.residual_trace.size() + 1);
  out.theta_dagger = v_hi >= v_lo ? high : low;
  out.converged = false;
  return out;
}

// Maximizes a unimodal integer function on [lo, hi]: ternary steps shrink
// the range to at most 9 points, then a linear scan settles plateaus with
// ties toward the smaller argument.
std::pair<std::int64_t, double> maximize_unimodal(
    const std::function<double(std::int64_t)>& f, std::int64_t lo,
    std::int64_t hi) {
  std::map<std::int64_t, double> memo;
  const auto value = [&](std::int64_t n) {
    const auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const double v = f(n);
    memo.emplace(n, v);
    return v;
  };
  while (hi - lo > 8) {
    const std::int64_t third = (hi - lo) / 3;
    const std::int64_t m1 = lo + third;
    const std::int64_t m2 = hi - third;
    const double f1 = value(m1);
    const double f2 = value(m2);
    if (f1 < f2) {
      lo = m1 + 1;
    } else if (f1 > f2) {
      hi = m2 - 1;
    } else {
      lo = m1;
      hi = m2;
    }
  }
  std::int64_t best = lo;
  double best_v = value(lo);
  for (std::int64_t n = lo + 1; n <= hi; ++n) {
    const double v = value(n);
    if (v > best_v) {
      best_v = v;
      best = n;
    }
  }
  return {best, best_v};
}

double quad(const std::function<double(double)>& f) {
  return integrate(f, 0.0, 1.0, 1e-12).value;
}

void check_exact_method(HedgeMethod method) {
  if (method == HedgeMethod::SBoN) {
    throw config_error(
        "sbon has no one-dimensional integral form; use the sampled residual");
  }
}

}  // namespace

const char* method_name(HedgeMethod method) {
  switch (method) {
    case HedgeMethod::BoN: return "bon";
    case HedgeMethod::SBoN: return "sbon";
    case HedgeMethod::BoP: return "bop";
  }
  return "?";
}

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::monotonic_improvement: return "monotonic_improvement";
    case Regime::reward_hacking: return "reward_hacking";
    case Regime::reward_grokking: return "reward_grokking";
    case Regime::immediate_decline: return "immediate_decline";
  }
  return "?";
}

HedgeMethod parse_method(const std::string& text) {
  if (text == "bon") return HedgeMethod::BoN;
  if (text == "sbon") return HedgeMethod::SBoN;
  if (text == "bop") return HedgeMethod::BoP;
  throw config_error("unknown method '" + text + "' (want bon, sbon, or bop)");
}

HedgeData HedgeData::from_pools(std::vector<CandidatePool> pools) {
  HedgeData data;
  data.true_by_quantile.reserve(pools.size());
  for (const CandidatePool& pool : pools) {
    std::vector<double> truths(pool.candidates.size());
    for (std::size_t i = 0; i < truths.size(); ++i) {
      truths[i] = pool.candidates[i].truth;
    }
    data.true_by_quantile.push_back(std::move(truths));
  }
  data.pools = std::move(pools);
  return data;
}

void HedgeData::validate() const {
  if (pools.empty()) {
    throw data_error("no pools");
  }
  if (true_by_quantile.size() != pools.size()) {
    throw data_error("true_by_quantile is not aligned with pools");
  }
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const std::vector<double>& u = pools[i].quantiles;
    if (u.empty()) {
      throw data_error("pool '" + pools[i].prompt_id + "' has no quantiles");
    }
    if (true_by_quantile[i].size() != u.size()) {
      throw data_error("pool '" + pools[i].prompt_id +
                       "' truths are not aligned with quantiles");
    }
    for (double uk : u) {
      if (!(uk > 0.0 && uk < 1.0)) {
        throw data_error("pool '" + pools[i].prompt_id +
                         "' has a quantile outside (0,1)");
      }
    }
    for (double rk : true_by_quantile[i]) {
      if (!std::isfinite(rk)) {
        throw data_error("pool '" + pools[i].prompt_id +
                         "' has a non-finite truth value");
      }
    }
  }
}

McEstimate residual(const HedgeSpec& spec, double theta, const HedgeData& data,
                    const McConfig& cfg, std::uint64_t theta_ordinal) {
  return mean_se(compute_pools(spec, theta, data, cfg, theta_ordinal).resid);
}

McEstimate policy_value(const HedgeSpec& spec, double theta,
                        const HedgeData& data, const McConfig& cfg,
                        std::uint64_t theta_ordinal) {
  return mean_se(compute_pools(spec, theta, data, cfg, theta_ordinal).value_r);
}

CalibrationResult find_threshold(const HedgeSpec& spec, const HedgeData& data,
                                 double low, double high, double tol,
                                 const McConfig& cfg) {
  data.validate();
  if (spec.method == HedgeMethod::SBoN) check_samples(cfg);
  const auto eval_residual = [&](double theta, std::uint64_t ordinal) {
    return residual(spec, theta, data, cfg, ordinal);
  };
  const auto eval_value = [&](double theta, std::uint64_t ordinal) {
    return policy_value(spec, theta, data, cfg, ordinal).mean;
  };
  const std::int64_t mc =
      spec.method == HedgeMethod::SBoN ? cfg.samples : 0;
  return threshold_impl(spec.method, eval_residual, eval_value, low, high, tol,
                        mc, cfg.seed);
}

std::pair<std::int64_t, double> best_integer_n(const HedgeData& data,
                                               std::int64_t n_max) {
  if (n_max < 1) {
    throw std::domain_error("n_max must be >= 1");
  }
  data.validate();
  // Truths sorted by quantile once; rank k then owns weight
  // (k/K)^n - ((k-1)/K)^n.
  std::vector<std::vector<double>> sorted_truths(data.pools.size());
  for (std::size_t i = 0; i < data.pools.size(); ++i) {
    const std::vector<double>& u = data.pools[i].quantiles;
    std::vector<std::size_t> order(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    sorted_truths[i].resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      sorted_truths[i][k] = data.true_by_quantile[i][order[k]];
    }
  }
  const auto f = [&](std::int64_t n) {
    const auto nd = static_cast<double>(n);
    double total = 0.0;
    for (const std::vector<double>& r : sorted_truths) {
      const auto K = static_cast<double>(r.size());
      double pool_sum = 0.0;
      double cdf_prev = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double cdf = std::pow(static_cast<double>(k + 1) / K, nd);
        pool_sum += (cdf - cdf_prev) * r[k];
        cdf_prev = cdf;
      }
      total += pool_sum;
    }
    return total / static_cast<double>(sorted_truths.size());
  };
  return maximize_unimodal(f, 1, n_max);
}

Regime classify_regime(const HedgeData& data, const HedgeSpec& spec,
                       const std::vector<double>& theta_grid,
                       const McConfig& cfg) {
  if (theta_grid.size() < 8) {
    throw config_error("regime grid needs at least 8 points");
  }
  for (std::size_t i = 0; i + 1 < theta_grid.size(); ++i) {
    if (!(theta_grid[i] < theta_grid[i + 1])) {
      throw config_error("regime grid must be strictly increasing");
    }
  }
  std::vector<McEstimate> v(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    v[i] = policy_value(spec, theta_grid[i], data, cfg, i);
  }
  // Rounding floor: a curve that is flat up to arithmetic noise must land
  // in the dead band even when the across-pool SE is zero (single pool, or
  // identical pools), so flat data classifies as flat.
  double scale = 0.0;
  for (const McEstimate& e : v) scale = std::max(scale, std::abs(e.mean));
  const double eps = 1e-12 * std::max(1.0, scale);
  const auto slope_sign = [&](std::size_t i) {
    McEstimate diff;
    diff.mean = v[i + 1].mean - v[i].mean;
    diff.se = std::hypot(v[i + 1].se, v[i].se) + eps;
    return sign_with_deadband(diff);
  };
  const std::size_t slopes = theta_grid.size() - 1;
  int first = 0;
  for (std::size_t i = 0; i < slopes && first == 0; ++i) {
    first = slope_sign(i);
  }
  int last = 0;
  for (std::size_t i = slopes; i-- > 0 && last == 0;) {
    last = slope_sign(i);
  }
  return regime_from_endpoint_signs(first, last);
}

std::vector<RewardCurvePoint> reward_curve(const HedgeSpec& spec,
                                           const std::vector<double>& thetas,
                                           const HedgeData& data,
                                           const McConfig& cfg) {
  std::vector<RewardCurvePoint> points;
  points.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double theta = thetas[i];
    const PoolBuffers buf = compute_pools(spec, theta, data, cfg, i);
    RewardCurvePoint pt;
    pt.theta = theta;
    pt.true_mean = mean_se(buf.value_r).mean;
    pt.proxy_mean = mean_se(buf.value_u).mean;
    switch (spec.method) {
      case HedgeMethod::BoN:
        pt.kl = policy_kl(PolicySpec::bon(theta));
        break;
      case HedgeMethod::BoP:
        pt.kl = policy_kl(PolicySpec::bop(theta));
        break;
      case HedgeMethod::SBoN: {
        // Model KL of soft selection has no closed form; estimate it on the
        // uniform quantile model at the deployed subset size.
        const std::int64_t n =
            spec.sbon_n > 0
                ? spec.sbon_n
                : static_cast<std::int64_t>(data.pools[0].candidates.size());
        pt.kl = sbon_mean_kl(n, theta, cfg).kl.mean;
        break;
      }
    }
    points.push_back(pt);
  }
  return points;
}

double residual_exact(HedgeMethod method, double theta,
                      const std::function<double(double)>& truth) {
  check_exact_method(method);
  check_theta(method, theta);
  const PolicySpec ps = hard_spec(method, theta);
  return quad([&](double u) {
    return truth(u) * score(ps, u) * policy_density(ps, u);
  });
}

double value_exact(HedgeMethod method, double theta,
                   const std::function<double(double)>& truth) {
  check_exact_method(method);
  check_theta(method, theta);
  const PolicySpec ps = hard_spec(method, theta);
  return quad([&](double u) { return truth(u) * policy_density(ps, u); });
}

CalibrationResult find_threshold_exact(
    HedgeMethod method, const std::function<double(double)>& truth, double low,
    double high, double tol) {
  check_exact_method(method);
  const auto eval_residual = [&](double theta, std::uint64_t) {
    return McEstimate{residual_exact(method, theta, truth), 0.0};
  };
  const auto eval_value = [&](double theta, std::uint64_t) {
    return value_exact(method, theta, truth);
  };
  return threshold_impl(method, eval_residual, eval_value, low, high, tol, 0,
                        0);
}

std::pair<std::int64_t, double> best_integer_n_exact(
    const std::function<double(double)>& truth, std::int64_t n_max) {
  if (n_max < 1) {
    throw std::domain_error("n_max must be >= 1");
  }
  const auto f = [&](std::int64_t n) {
    const PolicySpec ps = PolicySpec::bon(static_cast<double>(n));
    return quad([&](double u) { return truth(u) * policy_density(ps, u); });
  };
  return maximize_unimodal(f, 1, n_max);
}

}  // namespace hedgekit
