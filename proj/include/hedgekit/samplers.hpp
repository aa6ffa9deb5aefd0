#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hedgekit/policy.hpp"
#include "hedgekit/rng.hpp"

namespace hedgekit {

struct Candidate {
  std::string candidate_id;
  double proxy = 0.0;
  double truth = 0.0;
};

// One prompt's response set.  quantiles is optional (empty = absent); when
// present it is aligned with candidates and must preserve the proxy rank
// order.  validate() enforces the structural invariants and is called by the
// dataset loader; the selection hot path only assumes non-emptiness.
struct CandidatePool {
  std::string prompt_id;
  std::vector<Candidate> candidates;
  std::vector<double> quantiles;

  void validate() const;
};

// Outcome of one selection run.  chosen_index addresses the original pool
// (not the drawn subset) so callers can recover the winning candidate;
// pool_size_used is the realized subset size (n, or the capped Poisson
// draw), and seed is the origin of the stream that produced the draws, so
// replaying it reproduces the Selection exactly.
struct Selection {
  std::size_t chosen_index = 0;
  std::size_t pool_size_used = 0;
  PolicySpec policy;
  std::uint64_t seed = 0;
};

// Counters for the Poisson size cap.  Finite pools cannot honor unbounded
// draws; cap events should stay rare (< 0.1% of draws) for the policy
// analytics to remain valid, so callers surface a warning above that rate.
struct SelectDiagnostics {
  std::uint64_t poisson_draws = 0;
  std::uint64_t cap_events = 0;
};

// 1 + Poisson(mu).
std::uint64_t sample_poisson_size(double mu, Stream& stream);

// Index of the maximum, ties broken by lowest index.
std::size_t choose_argmax(const std::vector<double>& proxies);

// Index drawn with probability e^{lambda p_i} / sum_j e^{lambda p_j},
// max-shifted; lambda = 0 is exactly uniform.
std::size_t choose_softmax(const std::vector<double>& proxies, double lambda,
                           Stream& stream);

// Runs the policy's selection rule on a working subset drawn uniformly with
// replacement from the pool: size n for BoN/SBoN (must not exceed the pool),
// 1 + Poisson(mu) capped at the pool length for BoP/SBoP.  Argmax policies
// pick the subset's best proxy; soft policies draw the softmax index.
Selection select(const PolicySpec& policy, const CandidatePool& pool,
                 Stream& stream, SelectDiagnostics* diag = nullptr);

}  // namespace hedgekit
