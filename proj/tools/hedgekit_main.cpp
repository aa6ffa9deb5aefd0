// Command-line front door: toy dataset generation, frontier sweeps,
// threshold calibration, pool selection, BoP-vs-tilted verification, and
// finite-alphabet checks.  Exit codes: 0 success, 2 data error, 3
// configuration error, 64 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hedgekit/bop_optimality.hpp"
#include "hedgekit/common.hpp"
#include "hedgekit/dataset.hpp"
#include "hedgekit/discrete.hpp"
#include "hedgekit/grids.hpp"
#include "hedgekit/hedgetune.hpp"
#include "hedgekit/policy.hpp"
#include "hedgekit/rng.hpp"
#include "hedgekit/samplers.hpp"
#include "hedgekit/toy.hpp"

namespace {

using namespace hedgekit;

void print_warnings(const LoadedDataset& ds) {
  for (const std::string& w : ds.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

LoadedDataset load_with_truth(const std::string& path) {
  LoadedDataset ds = load_pools(path);
  print_warnings(ds);
  if (ds.first_missing_truth_line != 0) {
    throw data_error("line " + std::to_string(ds.first_missing_truth_line) +
                     ": missing true_score (this command needs every record "
                     "scored)");
  }
  return ds;
}

std::pair<double, double> parse_bracket(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos) {
    throw config_error("bracket must look like lo:hi, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument(lo_text);
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(hi_text);
    return {lo, hi};
  } catch (const std::exception&) {
    throw config_error("bracket has a malformed number in '" + text + "'");
  }
}

struct ToyArgs {
  double p = 12.0;
  std::int64_t prompts = 100;
  std::int64_t candidates = 512;
  std::uint64_t seed = 0;
  std::string out;
};

void run_toy(const ToyArgs& a) {
  ToyConfig cfg;
  cfg.p = a.p;
  cfg.prompts = a.prompts;
  cfg.candidates_per_prompt = a.candidates;
  cfg.seed = a.seed;
  const DatasetManifest m = generate_toy(cfg, a.out);
  std::cout << "wrote " << m.candidates_total << " candidates in " << m.pools
            << " pools to " << m.path << " (checksum " << m.checksum << ")\n";
}

struct CurvesArgs {
  std::string policy;
  std::string grid;
  std::string data;
  std::int64_t n = 0;
  std::int64_t samples = 4096;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "curves.csv";
};

void run_curves(const CurvesArgs& a) {
  HedgeSpec spec;
  spec.method = parse_method(a.policy);
  spec.sbon_n = a.n;
  if (spec.method == HedgeMethod::SBoN) {
    if (a.n < 1) throw config_error("--n is required for sbon");
    if (!a.seed_given) throw config_error("--seed is required for sbon");
  }
  LoadedDataset ds = load_with_truth(a.data);
  const HedgeData hd = HedgeData::from_pools(std::move(ds.pools));
  McConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  const std::vector<double> thetas = make_grid(parse_grid(a.grid));
  const std::vector<RewardCurvePoint> pts = reward_curve(spec, thetas, hd, cfg);
  write_curves_csv(a.out, pts);
  std::cout << "wrote " << pts.size() << " rows to " << a.out << '\n';
}

struct CalibrateArgs {
  std::string method;
  std::string data;
  std::string bracket;
  double tol = 1e-3;
  std::int64_t n = 0;
  std::int64_t samples = 2000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = "report";
};

void run_calibrate(const CalibrateArgs& a) {
  HedgeSpec spec;
  spec.method = parse_method(a.method);
  spec.sbon_n = a.n;
  if (spec.method == HedgeMethod::SBoN) {
    if (a.n < 1) throw config_error("--n is required for sbon");
    if (!a.seed_given) throw config_error("--seed is required for sbon");
  }
  LoadedDataset ds = load_with_truth(a.data);
  const HedgeData hd = HedgeData::from_pools(std::move(ds.pools));
  McConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = a.seed;

  std::string bracket = a.bracket;
  if (bracket.empty()) {
    switch (spec.method) {
      case HedgeMethod::BoN: bracket = "1:100"; break;
      case HedgeMethod::SBoN: bracket = "0:64"; break;
      case HedgeMethod::BoP: bracket = "0.1:200"; break;
    }
  }
  const auto [lo, hi] = parse_bracket(bracket);

  const CalibrationResult result = find_threshold(spec, hd, lo, hi, a.tol, cfg);
  const std::vector<std::string> written =
      write_report(a.out_dir, {result}, {});
  std::cout << "method=" << method_name(result.method)
            << " theta_dagger=" << format_double(result.theta_dagger)
            << " regime=" << regime_name(result.regime)
            << " converged=" << (result.converged ? "true" : "false")
            << " evaluations=" << result.residual_trace.size() << '\n';
  for (const std::string& path : written) {
    std::cout << "wrote " << path << '\n';
  }
}

struct SelectArgs {
  std::string policy;
  std::string data;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double mu = -1.0;
  double lambda = -1.0;
  std::int64_t reps = 1;
  std::string out = "selections.csv";
};

PolicySpec build_policy(const SelectArgs& a) {
  const auto need_n = [&] {
    if (a.n < 1) throw config_error("--n is required for this policy");
    return static_cast<double>(a.n);
  };
  const auto need_mu = [&] {
    if (a.mu < 0.0) throw config_error("--mu is required for this policy");
    return a.mu;
  };
  const auto need_lambda = [&] {
    if (a.lambda < 0.0) throw config_error("--lambda is required for this policy");
    return a.lambda;
  };
  if (a.policy == "bon") return PolicySpec::bon(need_n());
  if (a.policy == "sbon") return PolicySpec::sbon(need_n(), need_lambda());
  if (a.policy == "bop") return PolicySpec::bop(need_mu());
  if (a.policy == "sbop") return PolicySpec::sbop(need_mu(), need_lambda());
  throw config_error("unknown policy '" + a.policy +
                     "' (want bon, sbon, bop, or sbop)");
}

void run_select(const SelectArgs& a) {
  if (a.reps < 1) throw config_error("--reps must be >= 1");
  const PolicySpec policy = build_policy(a);
  LoadedDataset ds = load_pools(a.data);
  print_warnings(ds);

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw data_error("cannot open '" + a.out + "' for writing");
  out << "prompt_id,repetition,candidate_id,proxy_score,true_score,"
         "pool_size_used\n";

  SelectDiagnostics diag;
  std::int64_t rows = 0;
  for (std::size_t pool_idx = 0; pool_idx < ds.pools.size(); ++pool_idx) {
    const CandidatePool& pool = ds.pools[pool_idx];
    for (std::int64_t rep = 0; rep < a.reps; ++rep) {
      Stream stream =
          fork(a.seed, pool_idx, static_cast<std::uint64_t>(rep));
      const Selection sel = select(policy, pool, stream, &diag);
      const Candidate& c = pool.candidates[sel.chosen_index];
      out << pool.prompt_id << ',' << rep << ',' << c.candidate_id << ','
          << format_double(c.proxy) << ',' << format_double(c.truth) << ','
          << sel.pool_size_used << '\n';
      ++rows;
    }
  }
  if (!out.flush()) throw data_error("failed writing '" + a.out + "'");

  if (diag.poisson_draws > 0 &&
      static_cast<double>(diag.cap_events) >
          1e-3 * static_cast<double>(diag.poisson_draws)) {
    std::cerr << "warning: pool-size cap hit on " << diag.cap_events << " of "
              << diag.poisson_draws
              << " draws; results are biased toward plain best-of-pool\n";
  }
  std::cout << "wrote " << rows << " selections to " << a.out << '\n';
}

struct VerifyBopArgs {
  std::string mu_grid = "0.5:32:log:25";
  std::string alpha_grid = "0.01:100:log:60";
  std::int64_t u_res = 2000;
  std::string out;
};

void run_verify_bop(const VerifyBopArgs& a) {
  const std::vector<double> mus = make_grid(parse_grid(a.mu_grid));
  const std::vector<MatchResult> sweep = kl_gap_sweep(mus);
  std::size_t worst = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].kl_gap > sweep[worst].kl_gap) worst = i;
  }
  std::cout << "max kl gap = " << format_double(sweep[worst].kl_gap)
            << " at mu = " << format_double(sweep[worst].mu)
            << " (bound 0.0008)\n";

  if (a.u_res < 1000) throw config_error("--u-res must be >= 1000");
  const std::vector<double> alpha_mus = make_grid(parse_grid(a.alpha_grid));
  const double alpha =
      sup_log_ratio(alpha_mus, static_cast<std::size_t>(a.u_res));
  const double implied = alpha * std::exp(alpha) - std::exp(alpha) + 1.0;
  std::cout << "alpha (sup log ratio) = " << format_double(alpha) << '\n';
  std::cout << "implied gap bound phi(e^alpha) = " << format_double(implied)
            << '\n';

  if (!a.out.empty()) {
    std::ofstream csv(a.out, std::ios::binary);
    if (!csv) throw data_error("cannot open '" + a.out + "' for writing");
    csv << "mu,lambda_star,mean,kl_bop,kl_tilted,kl_gap\n";
    for (const MatchResult& m : sweep) {
      csv << format_double(m.mu) << ',' << format_double(m.lambda_star) << ','
          << format_double(m.mean) << ',' << format_double(m.kl_bop) << ','
          << format_double(m.kl_tilted) << ',' << format_double(m.kl_gap)
          << '\n';
    }
    if (!csv.flush()) throw data_error("failed writing '" + a.out + "'");
    std::cout << "wrote " << sweep.size() << " rows to " << a.out << '\n';
  }
}

struct DiscreteArgs {
  std::string spec;
  std::string kind = "bon";
  double theta1 = 2.0;
  double theta2 = 4.0;
  double mu = 4.0;
  double h = 0.0;
  std::string grid;
  std::string out;
};

DiscreteBase load_discrete_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw data_error("'" + path + "' is not a JSON object");
  }
  if (!j.contains("pmf") || !j["pmf"].is_array()) {
    throw data_error("'" + path + "' needs a \"pmf\" array");
  }
  std::vector<double> pmf;
  for (const auto& v : j["pmf"]) {
    if (!v.is_number()) throw data_error("pmf entries must be numbers");
    pmf.push_back(v.get<double>());
  }
  std::vector<double> truths;
  if (j.contains("truths")) {
    if (!j["truths"].is_array()) {
      throw data_error("\"truths\" must be an array");
    }
    for (const auto& v : j["truths"]) {
      if (!v.is_number()) throw data_error("truth entries must be numbers");
      truths.push_back(v.get<double>());
    }
  } else {
    // Default to the right-endpoint grid i/m, a monotone stand-in truth.
    truths.resize(pmf.size());
    for (std::size_t i = 0; i < truths.size(); ++i) {
      truths[i] = static_cast<double>(i + 1) / static_cast<double>(pmf.size());
    }
  }
  return DiscreteBase::from_pmf(std::move(pmf), std::move(truths));
}

void run_discrete(const DiscreteArgs& a) {
  const DiscreteBase base = load_discrete_spec(a.spec);
  DiscreteKind kind;
  if (a.kind == "bon") {
    kind = DiscreteKind::BoN;
  } else if (a.kind == "bop") {
    kind = DiscreteKind::BoP;
  } else {
    throw config_error("unknown kind '" + a.kind + "' (want bon or bop)");
  }

  for (double theta : {a.theta1, a.theta2}) {
    const std::vector<double> pi = discrete_policy_pmf(base, kind, theta);
    double sum = 0.0;
    for (double x : pi) sum += x;
    std::cout << "pmf sum at theta=" << format_double(theta) << ": "
              << format_double(sum) << '\n';
  }

  const MarginCheck tp2 = check_tp2(base, kind, a.theta1, a.theta2);
  std::cout << "tp2: " << (tp2.ok ? "ok" : "violated")
            << " (worst determinant " << format_double(tp2.worst) << ")\n";

  const MarginCheck mono = check_score_monotone(base, kind, a.theta1, a.h);
  std::cout << "score monotone: " << (mono.ok ? "ok" : "violated")
            << " (worst gap " << format_double(mono.worst) << ")\n";

  const auto [exact, bound] = discrete_bop_kl(base, a.mu);
  std::cout << "bop kl at mu=" << format_double(a.mu) << ": exact "
            << format_double(exact) << ", bound " << format_double(bound)
            << (exact <= bound + 1e-6 ? " (ok)" : " (exceeds bound)") << '\n';

  std::string grid_text = a.grid;
  if (grid_text.empty()) {
    grid_text = kind == DiscreteKind::BoN ? "1:32:log:40" : "0.01:32:log:40";
  }
  const std::vector<double> grid = make_grid(parse_grid(grid_text));
  const auto curve = discrete_reward_curve(base, kind, grid);
  std::vector<double> values(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) values[i] = curve[i].second;
  const ExtremaCount ext = count_extrema(values);
  std::cout << "curve: " << curve.size() << " points, " << ext.maxima
            << " interior maxima, " << ext.minima << " interior minima\n";

  if (!a.out.empty()) {
    std::ofstream csv(a.out, std::ios::binary);
    if (!csv) throw data_error("cannot open '" + a.out + "' for writing");
    csv << "theta,expected_truth\n";
    for (const auto& [theta, value] : curve) {
      csv << format_double(theta) << ',' << format_double(value) << '\n';
    }
    if (!csv.flush()) throw data_error("failed writing '" + a.out + "'");
    std::cout << "wrote " << curve.size() << " rows to " << a.out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hedgekit: inference-time selection policies, reward/KL frontiers, "
      "and hacking-threshold calibration"};
  app.require_subcommand(1);

  ToyArgs toy;
  CLI::App* toy_cmd = app.add_subcommand(
      "toy", "Generate the synthetic benchmark dataset");
  toy_cmd->add_option("--p", toy.p, "Truth exponent (peak at p/(p+1))");
  toy_cmd->add_option("--prompts", toy.prompts, "Number of pools");
  toy_cmd->add_option("--candidates", toy.candidates, "Candidates per pool");
  toy_cmd->add_option("--seed", toy.seed, "RNG seed")->required();
  toy_cmd->add_option("--out", toy.out, "Output dataset path")->required();

  CurvesArgs curves;
  CLI::App* curves_cmd = app.add_subcommand(
      "curves", "Sweep a strength grid and emit the reward/KL frontier");
  curves_cmd->add_option("--policy", curves.policy, "bon, sbon, or bop")
      ->required();
  curves_cmd->add_option("--grid", curves.grid, "lo:hi:scale:count")
      ->required();
  curves_cmd->add_option("--data", curves.data, "Dataset path")->required();
  curves_cmd->add_option("--n", curves.n, "Subset size (sbon)");
  curves_cmd->add_option("--samples", curves.samples,
                         "Monte Carlo replicates (sbon)");
  CLI::Option* curves_seed =
      curves_cmd->add_option("--seed", curves.seed, "RNG seed (sbon)");
  curves_cmd->add_option("--out", curves.out, "Output CSV path");

  CalibrateArgs cal;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate", "Find the hacking threshold from scored data");
  cal_cmd->add_option("--method", cal.method, "bon, sbon, or bop")
      ->required();
  cal_cmd->add_option("--data", cal.data, "Dataset path")->required();
  cal_cmd->add_option("--bracket", cal.bracket,
                      "lo:hi (default per method)");
  cal_cmd->add_option("--tol", cal.tol, "Bracket width tolerance");
  cal_cmd->add_option("--n", cal.n, "Subset size (sbon)");
  cal_cmd->add_option("--samples", cal.samples,
                      "Monte Carlo replicates (sbon)");
  CLI::Option* cal_seed =
      cal_cmd->add_option("--seed", cal.seed, "RNG seed (sbon)");
  cal_cmd->add_option("--out-dir", cal.out_dir, "Report directory");

  SelectArgs sel;
  CLI::App* sel_cmd = app.add_subcommand(
      "select", "Apply a selection policy to every pool");
  sel_cmd->add_option("--policy", sel.policy, "bon, sbon, bop, or sbop")
      ->required();
  sel_cmd->add_option("--data", sel.data, "Dataset path")->required();
  sel_cmd->add_option("--seed", sel.seed, "RNG seed")->required();
  sel_cmd->add_option("--n", sel.n, "Pool size n (bon/sbon)");
  sel_cmd->add_option("--mu", sel.mu, "Poisson rate (bop/sbop)");
  sel_cmd->add_option("--lambda", sel.lambda, "Softmax strength (sbon/sbop)");
  sel_cmd->add_option("--reps", sel.reps, "Selections per pool");
  sel_cmd->add_option("--out", sel.out, "Output CSV path");

  VerifyBopArgs vb;
  CLI::App* vb_cmd = app.add_subcommand(
      "verify-bop", "Check BoP against the matched tilted family");
  vb_cmd->add_option("--mu-grid", vb.mu_grid, "lo:hi:scale:count");
  vb_cmd->add_option("--alpha-grid", vb.alpha_grid,
                     "mu grid for the sup-log-ratio scan");
  vb_cmd->add_option("--u-res", vb.u_res, "u-grid resolution (>= 1000)");
  vb_cmd->add_option("--out", vb.out, "Optional sweep CSV path");

  DiscreteArgs disc;
  CLI::App* disc_cmd = app.add_subcommand(
      "discrete", "Finite-alphabet policy checks from a PMF spec file");
  disc_cmd->add_option("--spec", disc.spec, "JSON file with pmf and truths")
      ->required();
  disc_cmd->add_option("--kind", disc.kind, "bon or bop");
  disc_cmd->add_option("--theta1", disc.theta1, "Lower strength");
  disc_cmd->add_option("--theta2", disc.theta2, "Upper strength");
  disc_cmd->add_option("--mu", disc.mu, "Rate for the KL check");
  disc_cmd->add_option("--step", disc.h, "Finite-difference step (0 = auto)");
  disc_cmd->add_option("--grid", disc.grid, "Curve grid lo:hi:scale:count");
  disc_cmd->add_option("--out", disc.out, "Optional curve CSV path");

  try {
    app.parse(argc, argv);
    curves.seed_given = curves_seed->count() > 0;
    cal.seed_given = cal_seed->count() > 0;
    if (toy_cmd->parsed()) run_toy(toy);
    if (curves_cmd->parsed()) run_curves(curves);
    if (cal_cmd->parsed()) run_calibrate(cal);
    if (sel_cmd->parsed()) run_select(sel);
    if (vb_cmd->parsed()) run_verify_bop(vb);
    if (disc_cmd->parsed()) run_discrete(disc);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
