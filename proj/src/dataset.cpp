#include "hedgekit/dataset.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "hedgekit/common.hpp"
#include "hedgekit/quantiles.hpp"

namespace hedgekit {
namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::int64_t line, const std::string& what) {
  throw data_error("line " + std::to_string(line) + ": " + what);
}

double number_field(const json& j, const char* key, std::int64_t line) {
  const auto it = j.find(key);
  if (it == j.end()) {
    line_error(line, std::string("missing required field '") + key + "'");
  }
  if (!it->is_number()) {
    line_error(line, std::string("field '") + key + "' must be a number");
  }
  const double value = it->get<double>();
  if (!std::isfinite(value)) {
    line_error(line, std::string("field '") + key + "' is not finite");
  }
  return value;
}

std::string string_field(const json& j, const char* key, std::int64_t line) {
  const auto it = j.find(key);
  if (it == j.end()) {
    line_error(line, std::string("missing required field '") + key + "'");
  }
  if (!it->is_string()) {
    line_error(line, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw data_error("cannot open '" + path + "' for writing");
  }
  return out;
}

}  // namespace

LoadedDataset load_pools(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }

  LoadedDataset out;
  std::unordered_map<std::string, std::size_t> pool_index;
  std::unordered_set<std::string> seen_keys;
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t candidates = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      line_error(line_no, "not a JSON object");
    }

    Candidate c;
    const std::string prompt_id = string_field(j, "prompt_id", line_no);
    c.candidate_id = string_field(j, "candidate_id", line_no);
    c.proxy = number_field(j, "proxy_score", line_no);
    if (j.contains("true_score")) {
      c.truth = number_field(j, "true_score", line_no);
    } else if (out.first_missing_truth_line == 0) {
      out.first_missing_truth_line = line_no;
    }

    if (!seen_keys.insert(prompt_id + "\x1f" + c.candidate_id).second) {
      line_error(line_no, "duplicate candidate '" + c.candidate_id +
                              "' in prompt '" + prompt_id + "'");
    }

    const auto it = pool_index.find(prompt_id);
    if (it == pool_index.end()) {
      pool_index.emplace(prompt_id, out.pools.size());
      CandidatePool pool;
      pool.prompt_id = prompt_id;
      pool.candidates.push_back(std::move(c));
      out.pools.push_back(std::move(pool));
    } else {
      out.pools[it->second].candidates.push_back(std::move(c));
    }
    ++candidates;
  }

  if (out.pools.empty()) {
    throw data_error("no pools in '" + path + "'");
  }

  for (CandidatePool& pool : out.pools) {
    std::vector<double> proxies(pool.candidates.size());
    for (std::size_t i = 0; i < proxies.size(); ++i) {
      proxies[i] = pool.candidates[i].proxy;
    }
    pool.quantiles = to_quantiles(proxies);
    pool.validate();
    if (pool.candidates.size() < 16) {
      out.warnings.push_back("pool '" + pool.prompt_id + "' has only " +
                             std::to_string(pool.candidates.size()) +
                             " candidates; quantile atoms will be coarse");
    }
  }

  out.manifest.path = path;
  out.manifest.pools = static_cast<std::int64_t>(out.pools.size());
  out.manifest.candidates_total = candidates;
  out.manifest.truth_present = out.first_missing_truth_line == 0;
  out.manifest.checksum = file_checksum(path);
  return out;
}

void write_pools(const std::string& path,
                 const std::vector<CandidatePool>& pools) {
  std::ofstream out = open_for_write(path);
  for (const CandidatePool& pool : pools) {
    for (const Candidate& c : pool.candidates) {
      json j;
      j["prompt_id"] = pool.prompt_id;
      j["candidate_id"] = c.candidate_id;
      j["proxy_score"] = c.proxy;
      j["true_score"] = c.truth;
      out << j.dump() << '\n';
    }
  }
  if (!out.flush()) {
    throw data_error("failed writing '" + path + "'");
  }
}

void write_curves_csv(const std::string& path,
                      const std::vector<RewardCurvePoint>& points) {
  std::ofstream out = open_for_write(path);
  out << "theta,true_mean,proxy_mean,kl\n";
  for (const RewardCurvePoint& p : points) {
    out << format_double(p.theta) << ',' << format_double(p.true_mean) << ','
        << format_double(p.proxy_mean) << ',' << format_double(p.kl) << '\n';
  }
  if (!out.flush()) {
    throw data_error("failed writing '" + path + "'");
  }
}

std::vector<RewardCurvePoint> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line != "theta,true_mean,proxy_mean,kl") {
    throw data_error("'" + path + "' is not a curves CSV");
  }
  std::vector<RewardCurvePoint> points;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(row, cell, ',')) {
        line_error(line_no, "expected 4 columns");
      }
      const char* first = cell.data();
      const char* last = first + cell.size();
      const auto res = std::from_chars(first, last, vals[k]);
      if (res.ec != std::errc() || res.ptr != last) {
        line_error(line_no, "malformed number '" + cell + "'");
      }
    }
    points.push_back({vals[0], vals[1], vals[2], vals[3]});
  }
  return points;
}

void write_calibrations_csv(const std::string& path,
                            const std::vector<CalibrationResult>& results) {
  std::ofstream out = open_for_write(path);
  out << "method,theta_dagger,regime,converged,bracket_low,bracket_high,"
         "mc_samples,seed\n";
  for (const CalibrationResult& r : results) {
    out << method_name(r.method) << ',' << format_double(r.theta_dagger) << ','
        << regime_name(r.regime) << ',' << (r.converged ? "true" : "false")
        << ',' << format_double(r.bracket_low) << ','
        << format_double(r.bracket_high) << ',' << r.mc_samples << ','
        << r.seed << '\n';
  }
  if (!out.flush()) {
    throw data_error("failed writing '" + path + "'");
  }
}

std::vector<std::string> write_report(
    const std::string& dir, const std::vector<CalibrationResult>& results,
    const std::vector<RewardCurvePoint>& curves) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw data_error("cannot create directory '" + dir + "': " + ec.message());
  }
  const std::string calib = (std::filesystem::path(dir) / "calibrations.csv")
                                .string();
  const std::string curve = (std::filesystem::path(dir) / "curves.csv")
                                .string();
  write_calibrations_csv(calib, results);
  write_curves_csv(curve, curves);
  return {calib, curve};
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw data_error("cannot open '" + path + "'");
  }
  std::uint64_t hash = 1469598103934665603ull;
  char buffer[65536];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ull;
    }
    if (in.eof()) break;
  }
  return hash;
}

std::string format_double(double value) {
  char buffer[32];
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, res.ptr);
}

}  // namespace hedgekit
