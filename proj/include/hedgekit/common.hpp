#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hedgekit {

// Bad parameter combinations and malformed requests.  The CLI maps this to
// exit code 3.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (datasets, PMF spec files).  The CLI
// maps this to exit code 2.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Monte Carlo estimate together with the standard error of its mean.
// se == 0 for exact (zero-variance or single-observation) estimates.
struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and standard error of the mean, reduced in index order so the
// result does not depend on how the buffer was filled.  Summation is
// anchored on the first element: constant inputs (zero-variance replicates)
// must come back exact, with se identically 0.
inline McEstimate mean_se(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const double anchor = xs.empty() ? 0.0 : xs.front();
  double sum = 0.0;
  for (double x : xs) sum += x - anchor;
  const double mean = anchor + sum / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  const double se =
      std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
  return {mean, se};
}

}  // namespace hedgekit
