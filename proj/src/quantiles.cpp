#include "hedgekit/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hedgekit/common.hpp"

namespace hedgekit {

QuantileMap QuantileMap::fit(const std::vector<double>& scores, QuantileRule rule) {
  QuantileMap map;
  map.rule = rule;
  map.sorted_scores = scores;
  std::sort(map.sorted_scores.begin(), map.sorted_scores.end());
  return map;
}

std::vector<double> to_quantiles(const std::vector<double>& scores,
                                 QuantileRule rule) {
  const std::size_t k = scores.size();
  if (k == 0) throw data_error("to_quantiles: empty score list");
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(scores[i])) {
      throw data_error("to_quantiles: non-finite score at index " +
                       std::to_string(i));
    }
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average rank over each tie run, 1-based ranks.
  std::vector<double> rank(k);
  for (std::size_t lo = 0; lo < k;) {
    std::size_t hi = lo + 1;
    while (hi < k && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double avg = 0.5 * static_cast<double>(lo + 1 + hi);  // mean of lo+1 .. hi
    for (std::size_t j = lo; j < hi; ++j) rank[order[j]] = avg;
    lo = hi;
  }

  std::vector<double> out(k);
  const double denom = rule == QuantileRule::midpoint
                           ? static_cast<double>(k)
                           : static_cast<double>(k + 1);
  const double shift = rule == QuantileRule::midpoint ? 0.5 : 0.0;
  for (std::size_t i = 0; i < k; ++i) out[i] = (rank[i] - shift) / denom;
  return out;
}

}  // namespace hedgekit
