#pragma once

// Test-side helpers that are deliberately independent of the library's
// numerics: an adaptive Simpson integrator (the library uses tanh-sinh), an
// exponential-integral oracle built from the defining integral, a KS
// statistic, shape-constrained synthetic truths, and small builders for
// calibration data.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifdef HEDGEKIT_CLI_PATH
#include <sys/wait.h>
#endif

#include "hedgekit/hedgetune.hpp"
#include "hedgekit/samplers.hpp"

namespace testsupport {

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double fa, double b, double fb, double m, double fm,
                          double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with an absolute tolerance.
inline double integrate_simpson(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

// Ei(z) from the defining integral: gamma + ln z + int_0^z (e^t - 1)/t dt.
inline double ei_oracle(double z) {
  constexpr double kGamma = 0.5772156649015329;
  const auto g = [](double t) { return t == 0.0 ? 1.0 : std::expm1(t) / t; };
  const double scale = std::max(1.0, std::abs(std::expm1(z)));
  return kGamma + std::log(z) + integrate_simpson(g, 0.0, z, 1e-15 * scale);
}

// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_statistic(std::vector<double> xs,
                           const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max(d, std::max(std::abs(f - hi), std::abs(f - lo)));
  }
  return d;
}

struct PiecewiseLinear {
  std::vector<double> xs;  // strictly increasing, first 0 and last 1
  std::vector<double> ys;  // nonnegative levels

  double operator()(double u) const {
    if (u <= xs.front()) return ys.front();
    if (u >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double w = (u - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
};

// Random piecewise-linear truth from one of the four canonical shape
// classes: 0 nondecreasing, 1 nonincreasing, 2 single peak, 3 single valley.
// All levels lie in [0, 1), so the truth is bounded and nonnegative.
inline PiecewiseLinear shaped_truth(std::mt19937_64& gen, int shape) {
  std::uniform_int_distribution<int> knot_count(4, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = static_cast<std::size_t>(knot_count(gen));

  PiecewiseLinear out;
  out.xs.push_back(0.0);
  for (std::size_t i = 0; i + 2 < m; ++i) {
    out.xs.push_back(0.02 + 0.96 * unit(gen));
  }
  out.xs.push_back(1.0);
  std::sort(out.xs.begin(), out.xs.end());
  for (std::size_t i = 1; i < m; ++i) {  // keep knots separated
    if (out.xs[i] - out.xs[i - 1] < 1e-5) out.xs[i] = out.xs[i - 1] + 1e-5;
  }

  std::vector<double> levels(m);
  for (double& y : levels) y = unit(gen);
  std::sort(levels.begin(), levels.end());

  out.ys.resize(m);
  if (shape == 0) {
    out.ys = levels;
  } else if (shape == 1) {
    out.ys.assign(levels.rbegin(), levels.rend());
  } else {
    std::uniform_int_distribution<std::size_t> apex_at(1, m - 2);
    const std::size_t a = apex_at(gen);
    if (shape == 2) {
      // Ascend to the maximum level at the apex, then descend.
      const std::vector<double> rest(levels.begin(), levels.end() - 1);
      out.ys[a] = levels.back();
      for (std::size_t i = 0; i < a; ++i) out.ys[i] = rest[i];
      for (std::size_t i = a + 1; i < m; ++i) {
        out.ys[i] = rest[rest.size() - (i - a)];
      }
    } else {
      // Descend to the minimum level at the apex, then ascend.
      const std::vector<double> rest(levels.begin() + 1, levels.end());
      out.ys[a] = levels.front();
      for (std::size_t i = 0; i < a; ++i) {
        out.ys[i] = rest[rest.size() - 1 - i];
      }
      for (std::size_t i = a + 1; i < m; ++i) out.ys[i] = rest[i - a - 1];
    }
  }
  return out;
}

// One pool of `atoms` midpoint quantile atoms with truth evaluated on them.
inline hedgekit::HedgeData dense_data(const std::function<double(double)>& truth,
                                      std::size_t atoms) {
  hedgekit::CandidatePool pool;
  pool.prompt_id = "dense";
  pool.candidates.resize(atoms);
  pool.quantiles.resize(atoms);
  for (std::size_t k = 0; k < atoms; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(atoms);
    pool.candidates[k].candidate_id = "c" + std::to_string(k + 1);
    pool.candidates[k].proxy = u;
    pool.candidates[k].truth = truth(u);
    pool.quantiles[k] = u;
  }
  std::vector<hedgekit::CandidatePool> pools;
  pools.push_back(std::move(pool));
  return hedgekit::HedgeData::from_pools(std::move(pools));
}

// Several identical atom pools; useful for exercising the per-pool Monte
// Carlo streams and the across-pool standard error.
inline hedgekit::HedgeData replicated_pools(
    const std::function<double(double)>& truth, std::size_t atoms,
    std::size_t pool_count) {
  std::vector<hedgekit::CandidatePool> pools(pool_count);
  for (std::size_t p = 0; p < pool_count; ++p) {
    hedgekit::CandidatePool& pool = pools[p];
    pool.prompt_id = "p" + std::to_string(p + 1);
    pool.candidates.resize(atoms);
    pool.quantiles.resize(atoms);
    for (std::size_t k = 0; k < atoms; ++k) {
      const double u =
          (static_cast<double>(k) + 0.5) / static_cast<double>(atoms);
      pool.candidates[k].candidate_id = "c" + std::to_string(k + 1);
      pool.candidates[k].proxy = u;
      pool.candidates[k].truth = truth(u);
      pool.quantiles[k] = u;
    }
  }
  return hedgekit::HedgeData::from_pools(std::move(pools));
}

inline bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Runs fn, which must throw E, and returns the exception message.
template <typename E, typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("hedgekit_test_" + std::to_string(rd()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

#ifdef HEDGEKIT_CLI_PATH
struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CliResult run_cli(const std::string& args,
                         const std::string& capture_path) {
  const std::string cmd = std::string(HEDGEKIT_CLI_PATH) + " " + args + " > " +
                          capture_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = read_file(capture_path);
  return r;
}
#endif

}  // namespace testsupport
