#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hedgekit/hedgetune.hpp"
#include "hedgekit/samplers.hpp"

namespace hedgekit {

struct DatasetManifest {
  std::string path;
  std::int64_t pools = 0;
  std::int64_t candidates_total = 0;
  bool truth_present = false;
  std::uint64_t checksum = 0;
};

struct LoadedDataset {
  std::vector<CandidatePool> pools;
  DatasetManifest manifest;
  // 1-based line of the first record without true_score; 0 when all have it.
  // Loading tolerates missing truth so selection-only runs work; calibration
  // entry points turn this into an error naming the line.
  std::int64_t first_missing_truth_line = 0;
  std::vector<std::string> warnings;
};

// Reads line-delimited JSON records with keys prompt_id, candidate_id,
// proxy_score, and optional true_score.  One pool per prompt_id in first-
// appearance order, candidates in file order, quantiles fitted per pool
// with midpoint ranks.  Malformed lines, duplicate (prompt_id,
// candidate_id) pairs, and non-finite scores are data errors carrying the
// line number; pools smaller than 16 candidates only earn a warning (their
// quantile atoms are too coarse for reliable calibration).
LoadedDataset load_pools(const std::string& path);

// Writes pools in the load_pools format, reals as shortest round-trip
// decimals, so load(write(load(x))) preserves every numeric field exactly.
void write_pools(const std::string& path,
                 const std::vector<CandidatePool>& pools);

// curves CSV: header theta,true_mean,proxy_mean,kl, one row per point.
void write_curves_csv(const std::string& path,
                      const std::vector<RewardCurvePoint>& points);
std::vector<RewardCurvePoint> read_curves_csv(const std::string& path);

// calibration summary CSV: header method,theta_dagger,regime,converged,
// bracket_low,bracket_high,mc_samples,seed.
void write_calibrations_csv(const std::string& path,
                            const std::vector<CalibrationResult>& results);

// Writes calibrations.csv and curves.csv under dir (created if missing) and
// returns the paths written.
std::vector<std::string> write_report(
    const std::string& dir, const std::vector<CalibrationResult>& results,
    const std::vector<RewardCurvePoint>& curves);

// FNV-1a 64 over the file's raw bytes.
std::uint64_t file_checksum(const std::string& path);

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace hedgekit
