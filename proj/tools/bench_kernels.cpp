// Times the OpenMP Monte Carlo kernels against the serial reference
// implementations and checks that both produce bit-identical estimates.
// Usage: hedgekit-bench [replicates] [pool_n] [lambda] [mu]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "hedgekit/mc.hpp"
#include "hedgekit/parallel.hpp"

namespace {

using hedgekit::McConfig;
using hedgekit::McEstimate;
using hedgekit::PolicyMoments;

double run_ms(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

bool same_bits(const McEstimate& a, const McEstimate& b) {
  return a.mean == b.mean && a.se == b.se;
}

bool same_bits(const PolicyMoments& a, const PolicyMoments& b) {
  return same_bits(a.mean, b.mean) && same_bits(a.kl, b.kl);
}

template <typename Result>
bool report(const char* name, const std::function<Result()>& serial,
            const std::function<Result()>& parallel) {
  Result ref{};
  Result par{};
  parallel();  // warm the thread pool before timing
  const double serial_ms = run_ms([&] { ref = serial(); });
  const double parallel_ms = run_ms([&] { par = parallel(); });
  const bool match = same_bits(ref, par);
  std::printf("%-16s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "bit-identical" : "MISMATCH");
  return match;
}

}  // namespace

int main(int argc, char** argv) {
  McConfig cfg;
  cfg.samples = argc > 1 ? std::atoll(argv[1]) : 200000;
  cfg.seed = 42;
  const std::int64_t n = argc > 2 ? std::atoll(argv[2]) : 16;
  const double lambda = argc > 3 ? std::atof(argv[3]) : 4.0;
  const double mu = argc > 4 ? std::atof(argv[4]) : 8.0;

  std::printf("replicates %lld, pool n %lld, lambda %.3g, mu %.3g, threads %d\n",
              static_cast<long long>(cfg.samples), static_cast<long long>(n),
              lambda, mu, static_cast<int>(hedgekit::max_threads()));

  bool ok = true;
  ok &= report<McEstimate>(
      "log_partition",
      [&] { return hedgekit::reference::log_partition(n, lambda, cfg); },
      [&] { return hedgekit::log_partition(n, lambda, cfg); });
  ok &= report<PolicyMoments>(
      "sbon_mean_kl",
      [&] { return hedgekit::reference::sbon_mean_kl(n, lambda, cfg); },
      [&] { return hedgekit::sbon_mean_kl(n, lambda, cfg); });
  ok &= report<PolicyMoments>(
      "sbop_mean_kl",
      [&] { return hedgekit::reference::sbop_mean_kl(mu, lambda, cfg); },
      [&] { return hedgekit::sbop_mean_kl(mu, lambda, cfg); });
  ok &= report<PolicyMoments>(
      "bop_mc_mean_kl",
      [&] { return hedgekit::reference::bop_mc_mean_kl(mu, cfg); },
      [&] { return hedgekit::bop_mc_mean_kl(mu, cfg); });

  if (!ok) {
    std::fprintf(stderr, "parallel kernels diverged from the reference\n");
    return 1;
  }
  return 0;
}
