#include "hedgekit/toy.hpp"

#include <cmath>

#include "hedgekit/common.hpp"
#include "hedgekit/quantiles.hpp"
#include "hedgekit/rng.hpp"

namespace hedgekit {

void ToyConfig::validate() const {
  if (!std::isfinite(p) || p <= 0.0) {
    throw config_error("toy p must be > 0");
  }
  if (prompts < 1) {
    throw config_error("toy prompts must be >= 1");
  }
  if (candidates_per_prompt < 2) {
    throw config_error("toy candidates_per_prompt must be >= 2");
  }
}

double toy_norm(double p) {
  return std::pow(p / (p + 1.0), p) / (p + 1.0);
}

double toy_truth(double p, double u) {
  return std::pow(u, p) * (1.0 - u) / toy_norm(p);
}

std::vector<CandidatePool> generate_toy_pools(const ToyConfig& cfg) {
  cfg.validate();
  std::vector<CandidatePool> pools(static_cast<std::size_t>(cfg.prompts));
  for (std::size_t t = 0; t < pools.size(); ++t) {
    CandidatePool& pool = pools[t];
    pool.prompt_id = "p" + std::to_string(t + 1);
    pool.candidates.resize(static_cast<std::size_t>(cfg.candidates_per_prompt));
    Stream s = fork(cfg.seed, t);
    std::vector<double> proxies(pool.candidates.size());
    for (std::size_t j = 0; j < pool.candidates.size(); ++j) {
      const double u = s.next_open_unit();
      Candidate& c = pool.candidates[j];
      c.candidate_id = "c" + std::to_string(j + 1);
      c.proxy = u;
      c.truth = toy_truth(cfg.p, u);
      proxies[j] = u;
    }
    pool.quantiles = to_quantiles(proxies);
  }
  return pools;
}

DatasetManifest generate_toy(const ToyConfig& cfg, const std::string& path) {
  const std::vector<CandidatePool> pools = generate_toy_pools(cfg);
  write_pools(path, pools);
  DatasetManifest manifest;
  manifest.path = path;
  manifest.pools = cfg.prompts;
  manifest.candidates_total = cfg.prompts * cfg.candidates_per_prompt;
  manifest.truth_present = true;
  manifest.checksum = file_checksum(path);
  return manifest;
}

}  // namespace hedgekit
