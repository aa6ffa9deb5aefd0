#include "hedgekit/grids.hpp"

#include <cmath>
#include <sstream>

#include "hedgekit/common.hpp"

namespace hedgekit {
namespace {

void check_spec(const GridSpec& spec) {
  if (spec.count < 1) {
    throw config_error("grid count must be >= 1");
  }
  if (!(std::isfinite(spec.lo) && std::isfinite(spec.hi)) ||
      spec.lo > spec.hi || (spec.count > 1 && spec.lo == spec.hi)) {
    throw config_error("grid requires finite lo < hi");
  }
  if (spec.log_scale && spec.lo <= 0.0) {
    throw config_error("log grid requires lo > 0");
  }
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  std::istringstream in(text);
  std::string lo, hi, scale, count;
  if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') ||
      !std::getline(in, scale, ':') || !std::getline(in, count) ||
      in.rdbuf()->in_avail() != 0) {
    throw config_error("grid must look like lo:hi:scale:count, got '" + text +
                       "'");
  }
  GridSpec spec;
  try {
    std::size_t used = 0;
    spec.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    spec.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    const long long n = std::stoll(count, &used);
    if (used != count.size() || n < 0) throw std::invalid_argument(count);
    spec.count = static_cast<std::size_t>(n);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("grid has a malformed number in '" + text + "'");
  }
  if (scale == "lin") {
    spec.log_scale = false;
  } else if (scale == "log") {
    spec.log_scale = true;
  } else {
    throw config_error("grid scale must be lin or log, got '" + scale + "'");
  }
  check_spec(spec);
  return spec;
}

std::vector<double> make_grid(const GridSpec& spec) {
  check_spec(spec);
  std::vector<double> pts(spec.count);
  if (spec.count == 1) {
    pts[0] = spec.lo;
    return pts;
  }
  const double a = spec.log_scale ? std::log(spec.lo) : spec.lo;
  const double b = spec.log_scale ? std::log(spec.hi) : spec.hi;
  const double step = (b - a) / static_cast<double>(spec.count - 1);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const double t = a + step * static_cast<double>(i);
    pts[i] = spec.log_scale ? std::exp(t) : t;
  }
  // Pin the endpoints so downstream range checks see lo and hi exactly.
  pts.front() = spec.lo;
  pts.back() = spec.hi;
  return pts;
}

}  // namespace hedgekit
