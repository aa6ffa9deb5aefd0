#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hedgekit/dataset.hpp"
#include "hedgekit/samplers.hpp"

namespace hedgekit {

// Synthetic benchmark with a known hacking threshold: proxies are uniform
// and the true reward peaks at u = p/(p+1), normalized so the peak is 1.
struct ToyConfig {
  double p = 12.0;
  std::int64_t prompts = 1;
  std::int64_t candidates_per_prompt = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

// C = (p/(p+1))^p / (p+1), the maximum of u^p (1-u).
double toy_norm(double p);

// u^p (1-u) / C, so the best attainable truth is exactly 1.
double toy_truth(double p, double u);

// Pools with uniform (0,1) proxies, toy truths, and fitted quantiles;
// prompt ids p1..pN, candidate ids c1..cK, one stream per prompt.
std::vector<CandidatePool> generate_toy_pools(const ToyConfig& cfg);

// Writes the pools as a dataset file and reports its manifest.
DatasetManifest generate_toy(const ToyConfig& cfg, const std::string& path);

}  // namespace hedgekit
