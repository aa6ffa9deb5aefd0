#pragma once

#include <cstdint>

namespace hedgekit {

enum class PolicyKind { BoN, SBoN, BoP, SBoP, Tilted };

// Selection-policy parameters.  Only the fields a kind uses may be set:
//   BoN(n), SBoN(n, lambda), BoP(mu), SBoP(mu, lambda), Tilted(lambda).
// n is a real >= 1: integer for actual selection, continuous for the
// Beta(n, 1) relaxation used by the analytics.  Unused fields must stay 0,
// which the factories guarantee and validate() enforces.
struct PolicySpec {
  PolicyKind kind = PolicyKind::BoN;
  double n = 0.0;
  double mu = 0.0;
  double lambda = 0.0;

  static PolicySpec bon(double n);
  static PolicySpec sbon(double n, double lambda);
  static PolicySpec bop(double mu);
  static PolicySpec sbop(double mu, double lambda);
  static PolicySpec tilted(double lambda);
};

// Throws config_error on kind/parameter mismatch or out-of-range values.
void validate(const PolicySpec& spec);

const char* kind_name(PolicyKind kind);

// Density over the uniform quantile scale, defined for BoN, BoP, Tilted:
//   BoN(n):    n u^{n-1}
//   BoP(mu):   (mu u + 1) e^{mu (u - 1)}
//   Tilted(l): l e^{l u} / (e^l - 1)
// SBoN/SBoP have no closed-form density (config_error); u outside [0, 1]
// is a domain error.
double policy_density(const PolicySpec& spec, double u);

// ln of the above, computed without overflow for any parameter size.
// Returns -inf where the density is 0.
double policy_log_density(const PolicySpec& spec, double u);

// Expected quantile of the selected candidate:
//   BoN(n):    n / (n + 1)
//   BoP(mu):   1 - 1/mu + (1 - e^{-mu}) / mu^2
//   Tilted(l): 1/(1 - e^{-l}) - 1/l
// The mu -> 0 and lambda -> 0 removable singularities switch to second-order
// series below 1e-6, where the closed forms lose digits to cancellation.
double policy_mean(const PolicySpec& spec);

// KL(policy || uniform reference) in nats:
//   BoN(n):    ln n - (n - 1)/n
//   BoP(mu):   e^{-mu-1} (Ei(mu+1) - Ei(1)) / mu + ln(mu+1) - 1
//   Tilted(l): l E[u] - ln((e^l - 1)/l)
double policy_kl(const PolicySpec& spec);

// Score (d/dtheta of the log-density), defined for BoN and BoP:
//   BoN(n):  1/n + ln u          (u = 0 is a domain error)
//   BoP(mu): u - 1 + u/(mu u + 1)
// Mean zero under the policy's own density.
double score(const PolicySpec& spec, double u);

}  // namespace hedgekit
