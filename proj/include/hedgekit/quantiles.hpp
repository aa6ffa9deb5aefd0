#pragma once

#include <vector>

namespace hedgekit {

enum class QuantileRule { midpoint, right_cdf };

// Per-pool empirical quantile map.  midpoint emits (rank - 0.5)/K, right_cdf
// emits rank/(K + 1); both keep every output strictly inside (0, 1).  Ties
// always receive the average of their ranks.
struct QuantileMap {
  std::vector<double> sorted_scores;
  QuantileRule rule = QuantileRule::midpoint;

  static QuantileMap fit(const std::vector<double>& scores,
                         QuantileRule rule = QuantileRule::midpoint);
};

// Maps K raw scores to empirical quantiles under the given rule, in input
// order.  Throws data_error naming the index of any non-finite score.
std::vector<double> to_quantiles(const std::vector<double>& scores,
                                 QuantileRule rule = QuantileRule::midpoint);

}  // namespace hedgekit
