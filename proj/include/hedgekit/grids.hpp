#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hedgekit {

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  bool log_scale = false;
  std::size_t count = 0;
};

// Parses "lo:hi:scale:count" with scale in {lin, log}; log requires lo > 0.
// Malformed text or an invalid range is a configuration error.
GridSpec parse_grid(const std::string& text);

// Evenly spaced points including both endpoints; log_scale spaces them in
// ln space.  count == 1 degenerates to {lo}.
std::vector<double> make_grid(const GridSpec& spec);

}  // namespace hedgekit
