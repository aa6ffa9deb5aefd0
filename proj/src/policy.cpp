#include "hedgekit/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hedgekit/common.hpp"
#include "hedgekit/special.hpp"

namespace hedgekit {

namespace {

constexpr double kSeriesThreshold = 1e-6;
const double kEi1 = expi(1.0).value;

void check_quantile(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::domain_error("quantile must lie in [0, 1]");
  }
}

[[noreturn]] void reject_kind(const PolicySpec& spec, const char* op) {
  throw config_error(std::string(op) + ": not defined for kind '" +
                     kind_name(spec.kind) + "'");
}

double tilted_mean(double lambda) {
  if (lambda < kSeriesThreshold) return 0.5 + lambda / 12.0;
  return 1.0 / (-std::expm1(-lambda)) - 1.0 / lambda;
}

}  // namespace

PolicySpec PolicySpec::bon(double n) { return {PolicyKind::BoN, n, 0.0, 0.0}; }
PolicySpec PolicySpec::sbon(double n, double lambda) {
  return {PolicyKind::SBoN, n, 0.0, lambda};
}
PolicySpec PolicySpec::bop(double mu) { return {PolicyKind::BoP, 0.0, mu, 0.0}; }
PolicySpec PolicySpec::sbop(double mu, double lambda) {
  return {PolicyKind::SBoP, 0.0, mu, lambda};
}
PolicySpec PolicySpec::tilted(double lambda) {
  return {PolicyKind::Tilted, 0.0, 0.0, lambda};
}

const char* kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::BoN: return "bon";
    case PolicyKind::SBoN: return "sbon";
    case PolicyKind::BoP: return "bop";
    case PolicyKind::SBoP: return "sbop";
    case PolicyKind::Tilted: return "tilted";
  }
  return "?";
}

void validate(const PolicySpec& spec) {
  const bool uses_n = spec.kind == PolicyKind::BoN || spec.kind == PolicyKind::SBoN;
  const bool uses_mu = spec.kind == PolicyKind::BoP || spec.kind == PolicyKind::SBoP;
  const bool uses_lambda = spec.kind == PolicyKind::SBoN ||
                           spec.kind == PolicyKind::SBoP ||
                           spec.kind == PolicyKind::Tilted;
  if (uses_n ? !(std::isfinite(spec.n) && spec.n >= 1.0) : spec.n != 0.0) {
    throw config_error("policy: n must be >= 1 and only set for bon/sbon");
  }
  if (uses_mu ? !(std::isfinite(spec.mu) && spec.mu >= 0.0) : spec.mu != 0.0) {
    throw config_error("policy: mu must be >= 0 and only set for bop/sbop");
  }
  if (uses_lambda ? !(std::isfinite(spec.lambda) && spec.lambda >= 0.0)
                  : spec.lambda != 0.0) {
    throw config_error(
        "policy: lambda must be >= 0 and only set for sbon/sbop/tilted");
  }
}

double policy_density(const PolicySpec& spec, double u) {
  check_quantile(u);
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::BoN:
      if (spec.n == 1.0) return 1.0;
      return u == 0.0 ? 0.0 : spec.n * std::pow(u, spec.n - 1.0);
    case PolicyKind::BoP:
      return (spec.mu * u + 1.0) * std::exp(spec.mu * (u - 1.0));
    case PolicyKind::Tilted: {
      if (spec.lambda == 0.0) return 1.0;
      // lambda e^{lambda u} / (e^lambda - 1), arranged to avoid overflow:
      // the numerator exponent is lambda (u - 1) <= 0.
      return spec.lambda * std::exp(spec.lambda * (u - 1.0)) /
             (-std::expm1(-spec.lambda));
    }
    default:
      reject_kind(spec, "policy_density");
  }
}

double policy_log_density(const PolicySpec& spec, double u) {
  check_quantile(u);
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::BoN:
      if (spec.n == 1.0) return 0.0;
      return std::log(spec.n) + (spec.n - 1.0) * std::log(u);
    case PolicyKind::BoP:
      return std::log1p(spec.mu * u) + spec.mu * (u - 1.0);
    case PolicyKind::Tilted:
      if (spec.lambda == 0.0) return 0.0;
      return std::log(spec.lambda) + spec.lambda * (u - 1.0) -
             std::log(-std::expm1(-spec.lambda));
    default:
      reject_kind(spec, "policy_log_density");
  }
}

double policy_mean(const PolicySpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::BoN:
      return spec.n / (spec.n + 1.0);
    case PolicyKind::BoP: {
      const double mu = spec.mu;
      if (mu < kSeriesThreshold) return 0.5 + mu / 6.0 - mu * mu / 24.0;
      return 1.0 - 1.0 / mu + (-std::expm1(-mu)) / (mu * mu);
    }
    case PolicyKind::Tilted:
      return tilted_mean(spec.lambda);
    default:
      reject_kind(spec, "policy_mean");
  }
}

double policy_kl(const PolicySpec& spec) {
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::BoN:
      if (spec.n == 1.0) return 0.0;
      return std::log(spec.n) - (spec.n - 1.0) / spec.n;
    case PolicyKind::BoP: {
      const double mu = spec.mu;
      if (mu < kSeriesThreshold) return mu * mu / 6.0;
      // e^{-mu-1}(Ei(mu+1) - Ei(1))/mu + ln(mu+1) - 1, using the scaled
      // exponential integral so large rates neither overflow nor lose the
      // leading digits.
      const double scaled = expi_scaled(mu + 1.0).value -
                            kEi1 * std::exp(-(mu + 1.0));
      return scaled / mu + std::log1p(mu) - 1.0;
    }
    case PolicyKind::Tilted: {
      const double lambda = spec.lambda;
      if (lambda < kSeriesThreshold) return lambda * lambda / 24.0;
      const double log_z = log_expm1(lambda) - std::log(lambda);
      return lambda * tilted_mean(lambda) - log_z;
    }
    default:
      reject_kind(spec, "policy_kl");
  }
}

double score(const PolicySpec& spec, double u) {
  check_quantile(u);
  validate(spec);
  switch (spec.kind) {
    case PolicyKind::BoN:
      if (u == 0.0) {
        throw std::domain_error("score: BoN score diverges at u = 0");
      }
      return 1.0 / spec.n + std::log(u);
    case PolicyKind::BoP:
      return u - 1.0 + u / (spec.mu * u + 1.0);
    default:
      reject_kind(spec, "score");
  }
}

}  // namespace hedgekit
