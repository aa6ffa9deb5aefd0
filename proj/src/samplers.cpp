#include "hedgekit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "hedgekit/common.hpp"

namespace hedgekit {

void CandidatePool::validate() const {
  if (candidates.empty()) {
    throw data_error("pool '" + prompt_id + "' has no candidates");
  }
  std::unordered_set<std::string> seen;
  for (const Candidate& c : candidates) {
    if (!seen.insert(c.candidate_id).second) {
      throw data_error("pool '" + prompt_id + "' repeats candidate_id '" +
                       c.candidate_id + "'");
    }
  }
  if (quantiles.empty()) return;
  if (quantiles.size() != candidates.size()) {
    throw data_error("pool '" + prompt_id +
                     "' quantiles are not aligned with candidates");
  }
  for (double u : quantiles) {
    if (!(u > 0.0 && u < 1.0)) {
      throw data_error("pool '" + prompt_id + "' has a quantile outside (0,1)");
    }
  }
  // Untied proxies must keep their order on the quantile scale.  Walking
  // candidates sorted by proxy, every quantile in one tie run must stay
  // below every quantile in the next run; within a run order is free.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return candidates[a].proxy < candidates[b].proxy;
  });
  std::size_t i = 0;
  double prev_run_max = 0.0;
  bool have_prev = false;
  while (i < order.size()) {
    std::size_t j = i;
    double run_min = quantiles[order[i]];
    double run_max = run_min;
    while (j + 1 < order.size() &&
           candidates[order[j + 1]].proxy == candidates[order[i]].proxy) {
      ++j;
      run_min = std::min(run_min, quantiles[order[j]]);
      run_max = std::max(run_max, quantiles[order[j]]);
    }
    if (have_prev && prev_run_max >= run_min) {
      throw data_error("pool '" + prompt_id +
                       "' quantiles break the proxy rank order");
    }
    prev_run_max = run_max;
    have_prev = true;
    i = j + 1;
  }
}

std::uint64_t sample_poisson_size(double mu, Stream& stream) {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::domain_error("mu must be finite and >= 0");
  }
  return 1 + stream.next_poisson(mu);
}

std::size_t choose_argmax(const std::vector<double>& proxies) {
  if (proxies.empty()) {
    throw std::domain_error("argmax of an empty list");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < proxies.size(); ++i) {
    if (proxies[i] > proxies[best]) best = i;
  }
  return best;
}

std::size_t choose_softmax(const std::vector<double>& proxies, double lambda,
                           Stream& stream) {
  if (proxies.empty()) {
    throw std::domain_error("softmax over an empty list");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::domain_error("lambda must be finite and >= 0");
  }
  const double shift = proxies[choose_argmax(proxies)];
  double total = 0.0;
  std::vector<double> cum(proxies.size());
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    total += std::exp(lambda * (proxies[i] - shift));
    cum[i] = total;
  }
  const double r = stream.next_unit() * total;
  for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
    if (r < cum[i]) return i;
  }
  return cum.size() - 1;
}

Selection select(const PolicySpec& policy, const CandidatePool& pool,
                 Stream& stream, SelectDiagnostics* diag) {
  validate(policy);
  const std::size_t pool_size = pool.candidates.size();
  if (pool_size == 0) {
    throw std::domain_error("select on an empty pool");
  }

  std::size_t subset_size = 0;
  switch (policy.kind) {
    case PolicyKind::BoN:
    case PolicyKind::SBoN: {
      const auto n = static_cast<std::size_t>(policy.n);
      if (n > pool_size) {
        throw config_error("n exceeds the pool length");
      }
      subset_size = n;
      break;
    }
    case PolicyKind::BoP:
    case PolicyKind::SBoP: {
      const std::uint64_t drawn = sample_poisson_size(policy.mu, stream);
      if (diag) ++diag->poisson_draws;
      if (drawn > pool_size) {
        subset_size = pool_size;
        if (diag) ++diag->cap_events;
      } else {
        subset_size = static_cast<std::size_t>(drawn);
      }
      break;
    }
    case PolicyKind::Tilted:
      throw config_error("tilted policy has no sampling algorithm");
  }

  std::vector<std::size_t> subset(subset_size);
  std::vector<double> proxies(subset_size);
  for (std::size_t i = 0; i < subset_size; ++i) {
    subset[i] = static_cast<std::size_t>(stream.next_index(pool_size));
    proxies[i] = pool.candidates[subset[i]].proxy;
  }

  std::size_t pick = 0;
  if (policy.kind == PolicyKind::BoN || policy.kind == PolicyKind::BoP) {
    pick = choose_argmax(proxies);
  } else {
    pick = choose_softmax(proxies, policy.lambda, stream);
  }

  Selection sel;
  sel.chosen_index = subset[pick];
  sel.pool_size_used = subset_size;
  sel.policy = policy;
  sel.seed = stream.origin();
  return sel;
}

}  // namespace hedgekit
