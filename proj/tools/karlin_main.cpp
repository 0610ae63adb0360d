// Command-line front end: simulate paths, run verification suites, sample
// limit measures, and emit plot data. Thin shell over the library; every
// behavior here is reachable through the public headers with the same seeds.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "karlin/analytic.hpp"
#include "karlin/geometry.hpp"
#include "karlin/limit_measures.hpp"
#include "karlin/poisson_karlin.hpp"
#include "karlin/process.hpp"
#include "karlin/rng.hpp"
#include "karlin/verify.hpp"
#include "karlin/version.hpp"

namespace {

namespace kg = karlin::geometry;
namespace kp = karlin::process;
namespace kv = karlin::verify;
namespace lm = karlin::limit_measures;

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

// FNV-1a over the resolved-config text; stable across platforms, used only
// to stamp output headers so files can be traced back to their settings.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string header_comment(const std::string& config_text,
                           std::uint64_t seed) {
  std::ostringstream out;
  out << "# karlin version=" << karlin::kVersion << " config_hash=" << std::hex
      << fnv1a(config_text) << std::dec << " seed=" << seed << '\n';
  return out.str();
}

struct ParamFlags {
  double alpha = 1.0;
  double alpha_prime = 2.0;
  double beta = 0.5;
  std::string regime;  // "", noise, signal, critical, auto
  bool alpha_set = false;
  bool alpha_prime_set = false;
  bool beta_set = false;

  // The convenience --regime flag fills in the canonical triple for a
  // regime when the explicit values are absent.
  void resolve() {
    if (regime.empty() || regime == "auto") return;
    if (alpha_set || alpha_prime_set || beta_set) return;
    if (regime == "noise") {
      alpha = 3.0;
      alpha_prime = 1.0;
      beta = 0.5;
    } else if (regime == "signal") {
      alpha = 0.5;
      alpha_prime = 2.0;
      beta = 0.5;
    } else if (regime == "critical") {
      alpha = 1.0;
      alpha_prime = 2.0;
      beta = 0.5;
    } else {
      throw CLI::ValidationError(
          "--regime must be one of noise|signal|critical|auto");
    }
  }

  kp::ModelParams params() const {
    return kp::ModelParams::standard(alpha, alpha_prime, beta);
  }
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
  cmd->add_option("--alpha", flags.alpha, "signal tail exponent")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha-prime", flags.alpha_prime, "noise tail exponent")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--beta", flags.beta, "label-law memory parameter in (0,1)");
  cmd->add_option("--regime", flags.regime,
                  "canonical parameter preset: noise|signal|critical|auto");
}

void note_param_presence(CLI::App* cmd, ParamFlags& flags) {
  flags.alpha_set = cmd->count("--alpha") > 0;
  flags.alpha_prime_set = cmd->count("--alpha-prime") > 0;
  flags.beta_set = cmd->count("--beta") > 0;
  flags.resolve();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open output file: " + path);
  }
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------
struct SimulateArgs {
  ParamFlags flags;
  std::uint64_t n = 1000;
  double lambda = 0.0;
  std::size_t dim = 1;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_simulate(const SimulateArgs& args) {
  const kp::ModelParams params = args.flags.params();
  const std::string regime = karlin::analytic::regime_name(
      karlin::analytic::regime_classify(params.alpha, params.alpha_prime,
                                        params.beta));
  nlohmann::ordered_json cfg;
  cfg["cmd"] = "simulate";
  cfg["alpha"] = params.alpha;
  cfg["alpha_prime"] = params.alpha_prime;
  cfg["beta"] = params.beta;
  cfg["n"] = args.n;
  cfg["lambda"] = args.lambda;
  cfg["dim"] = args.dim;
  const std::string header = header_comment(cfg.dump(), args.seed);

  std::ostringstream body;
  karlin::RngStream rng(args.seed, 0);
  std::string summary;
  if (args.lambda > 0.0) {
    const auto points = karlin::poisson_karlin::simulate_marked_points(
        params, args.lambda, args.dim, rng);
    karlin::poisson_karlin::write_points_csv(points, body);
    double max_x = 0.0;
    for (std::uint64_t i = 0; i < points.count; ++i) {
      max_x = std::max(max_x, points.product_at(i));
    }
    std::ostringstream s;
    s << "lambda=" << points.lambda << " count=" << points.count
      << " K=" << points.signal_values.size() << " max_x=" << max_x
      << " regime=" << regime;
    summary = s.str();
  } else {
    if (args.n == 0) {
      throw std::invalid_argument("--n must be a positive path length");
    }
    const auto path = kp::simulate_path(params, args.n, rng);
    kp::write_path_csv(path, body);
    double max_x = 0.0;
    for (const double x : path.products) max_x = std::max(max_x, x);
    std::ostringstream s;
    s << "n=" << path.n << " K=" << path.signal_values.size()
      << " max_x=" << max_x << " regime=" << regime;
    summary = s.str();
  }

  if (args.out_path.empty()) {
    std::cout << header << body.str();
  } else {
    auto out = open_output(args.out_path);
    out << header << body.str();
  }
  std::cout << summary << '\n';
  return kExitPass;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------
struct VerifyArgs {
  ParamFlags flags;
  std::string suite;
  std::string config_path;
  std::string boxes;
  std::uint64_t n = 0;
  double lambda = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t realizations = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  double ks_tolerance = 0.0;
  std::string out_path;
  // presence markers for config-file overrides
  bool suite_set = false, boxes_set = false, n_set = false, lambda_set = false,
       reps_set = false, realizations_set = false, seed_set = false,
       threads_set = false, tol_set = false, params_set = false;
};

int cmd_verify(const VerifyArgs& args) {
  kv::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      throw std::invalid_argument("cannot open config file: " +
                                  args.config_path);
    }
    nlohmann::json j = nlohmann::json::parse(in);  // throws on malformed
    cfg = kv::ExperimentConfig::from_json(j);
  }
  if (args.suite_set || args.config_path.empty()) {
    if (args.suite.empty()) {
      throw std::invalid_argument("--suite is required (or give --config)");
    }
    cfg.suite = kv::suite_from_name(args.suite);
  }
  if (args.params_set || args.config_path.empty()) {
    cfg.params = args.flags.params();
  }
  if (!args.flags.regime.empty() && args.flags.regime != "auto") {
    cfg.expected_regime = args.flags.regime;
  }
  if (args.boxes_set) cfg.boxes = kg::parse_boxes(args.boxes);
  if (args.n_set) cfg.n = args.n;
  if (args.lambda_set) cfg.lambda = args.lambda;
  if (args.reps_set) cfg.reps = args.reps;
  if (args.realizations_set) cfg.realizations = args.realizations;
  if (args.seed_set || args.config_path.empty()) cfg.seed = args.seed;
  if (args.threads_set) cfg.threads = args.threads;
  if (args.tol_set) cfg.ks_tolerance = args.ks_tolerance;
  cfg.validate();

  const kv::VerificationReport report = kv::run_experiment(cfg);
  if (args.out_path.empty()) {
    kv::write_report_json(report, std::cout);
  } else {
    auto out = open_output(args.out_path);
    kv::write_report_json(report, out);
    // Per-box empirical-CDF CSVs next to the report.
    const std::string stem =
        args.out_path.size() > 5 &&
                args.out_path.substr(args.out_path.size() - 5) == ".json"
            ? args.out_path.substr(0, args.out_path.size() - 5)
            : args.out_path;
    for (const auto& table : report.cdf_tables) {
      auto csv = open_output(stem + "." + table.name + ".csv");
      csv << header_comment(report.config.dump(), report.seed);
      csv << "z,F_emp,F_target\n";
      csv.precision(17);
      for (const auto& row : table.rows) {
        csv << row[0] << ',' << row[1] << ',' << row[2] << '\n';
      }
    }
  }
  std::cerr << "suite=" << report.suite << " records="
            << report.records.size() << " all_pass=" << report.all_pass
            << " bonferroni_pass=" << report.bonferroni_pass << '\n';
  return report.bonferroni_pass ? kExitPass : kExitVerifyFail;
}

// ---------------------------------------------------------------------------
// limits
// ---------------------------------------------------------------------------
struct LimitsArgs {
  ParamFlags flags;
  std::string kind;
  std::uint64_t samples = 1000;
  std::string boxes = "0:1";
  double m_min = 0.0;  // 0 -> smallest box measure
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_limits(const LimitsArgs& args) {
  const auto boxes = kg::parse_boxes(args.boxes);
  if (boxes.empty()) throw std::invalid_argument("--boxes is empty");
  double min_mu = 1.0;
  for (const auto& box : boxes) min_mu = std::min(min_mu, box.measure());
  lm::TruncationPolicy policy;
  policy.m_min = args.m_min > 0.0 ? args.m_min : min_mu;
  policy.dim = boxes.front().dim();

  const double alpha = args.flags.alpha;
  const double alpha_prime = args.flags.alpha_prime;
  const double beta = args.flags.beta;
  const auto labels =
      std::make_shared<const karlin::samplers::ZetaLabelLaw>(beta);

  // One sampler thunk per kind; parameter errors surface as
  // std::invalid_argument / std::domain_error (usage exit code).
  std::function<lm::TruncatedRsm(karlin::RngStream&)> draw;
  if (args.kind == "is") {
    draw = [&](karlin::RngStream& rng) {
      return lm::sample_is_rsm(alpha, policy, rng);
    };
  } else if (args.kind == "karlin") {
    draw = [&](karlin::RngStream& rng) {
      return lm::sample_karlin_rsm(alpha, beta, policy, rng);
    };
  } else if (args.kind == "signal") {
    draw = [&](karlin::RngStream& rng) {
      return lm::sample_signal_limit_rsm(alpha, beta, {alpha_prime, 1.0},
                                         policy, rng);
    };
  } else if (args.kind == "critical") {
    draw = [&](karlin::RngStream& rng) {
      return lm::sample_critical_limit_rsm(alpha_prime, beta, policy, rng);
    };
  } else if (args.kind == "noise") {
    const std::uint64_t env_seed =
        karlin::RngStream(args.seed, static_cast<std::uint64_t>(-1))
            .next_bits();
    const auto env = lm::SignalEnvironment::pareto(env_seed, {alpha, 1.0},
                                                   labels);
    const double kappa = 0.5 * (alpha / beta - alpha_prime);
    if (!(kappa > 0.0)) {
      throw std::invalid_argument(
          "noise kind requires alpha > alpha_prime*beta");
    }
    const auto cached =
        env.with_cached_certificate(alpha_prime + kappa, policy.delta / 4.0);
    draw = [&, cached](karlin::RngStream& rng) {
      return lm::sample_noise_limit_rsm(alpha_prime, cached, policy, rng);
    };
  } else {
    throw std::invalid_argument(
        "--kind must be one of is|karlin|signal|critical|noise");
  }

  // Eagerly validate parameters so bad configs fail before any output.
  {
    karlin::RngStream probe(args.seed, 0);
    (void)draw(probe);
  }

  nlohmann::ordered_json cfg;
  cfg["cmd"] = "limits";
  cfg["kind"] = args.kind;
  cfg["alpha"] = alpha;
  cfg["alpha_prime"] = alpha_prime;
  cfg["beta"] = beta;
  cfg["samples"] = args.samples;
  cfg["boxes"] = args.boxes;
  cfg["m_min"] = policy.m_min;
  std::ostringstream body;
  body.precision(17);
  body << "rep,box_id,value\n";
  for (std::uint64_t r = 0; r < args.samples; ++r) {
    karlin::RngStream rng(args.seed, r);
    const auto rsm = draw(rng);
    const auto evals = lm::evaluate(rsm, boxes);
    for (std::size_t b = 0; b < evals.size(); ++b) {
      body << r << ',' << b << ',' << evals[b].value << '\n';
    }
  }
  if (args.out_path.empty()) {
    std::cout << header_comment(cfg.dump(), args.seed) << body.str();
  } else {
    auto out = open_output(args.out_path);
    out << header_comment(cfg.dump(), args.seed) << body.str();
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------
struct PlotdataArgs {
  ParamFlags flags;
  std::uint64_t n = 100000;
  std::size_t top = 5;
  std::uint64_t seed = 1;
  std::string out_path = "plot";
};

void write_top_csv(const std::string& path, const std::string& header,
                   const kp::LabeledPath& path_data,
                   const std::vector<std::pair<std::uint64_t, double>>& top) {
  auto out = open_output(path);
  out << header;
  out << "rank,i,u,value,label\n";
  out.precision(17);
  for (std::size_t k = 0; k < top.size(); ++k) {
    const std::uint64_t i1 = top[k].first;  // 1-based index
    out << (k + 1) << ',' << i1 << ',' << path_data.location(i1 - 1) << ','
        << top[k].second << ',' << path_data.labels[i1 - 1] << '\n';
  }
}

int cmd_plotdata(const PlotdataArgs& args) {
  if (args.n == 0) {
    throw std::invalid_argument("--n must be a positive path length");
  }
  const kp::ModelParams params = args.flags.params();
  nlohmann::ordered_json cfg;
  cfg["cmd"] = "plotdata";
  cfg["alpha"] = params.alpha;
  cfg["alpha_prime"] = params.alpha_prime;
  cfg["beta"] = params.beta;
  cfg["n"] = args.n;
  cfg["top"] = args.top;
  const std::string header = header_comment(cfg.dump(), args.seed);

  karlin::RngStream rng(args.seed, 0);
  const auto path = kp::simulate_path(params, args.n, rng);
  const auto tops = kp::top_locations(path, args.top);

  {
    auto out = open_output(args.out_path + ".csv");
    out << header;
    kp::write_path_csv(path, out);
  }
  write_top_csv(args.out_path + ".top_x.csv", header, path, tops.by_product);
  write_top_csv(args.out_path + ".top_sigma.csv", header, path,
                tops.by_signal);
  write_top_csv(args.out_path + ".top_z.csv", header, path, tops.by_noise);
  std::cout << "wrote " << args.out_path << ".csv and 3 top-" << args.top
            << " marker files\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic simulation and verification toolkit for "
               "label-clustered heavy-tailed extremes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(karlin::kVersion));

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "simulate one model path");
  add_param_flags(c_sim, sim.flags);
  c_sim->add_option("--n", sim.n, "path length");
  c_sim->add_option("--lambda", sim.lambda,
                    "Poisson intensity (switches to the Poisson model)");
  c_sim->add_option("--dim", sim.dim, "location dimension (Poisson model)")
      ->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out", sim.out_path, "output CSV path (default stdout)");

  VerifyArgs ver;
  CLI::App* c_ver = app.add_subcommand("verify", "run a verification suite");
  add_param_flags(c_ver, ver.flags);
  c_ver->add_option("--suite", ver.suite,
                    "sibuya|stable|occupancy|rsm|regime|poissonization");
  c_ver->add_option("--config", ver.config_path, "experiment config JSON");
  c_ver->add_option("--boxes", ver.boxes, "box list, e.g. \"0:0.5,0.5:1\"");
  c_ver->add_option("--n", ver.n, "path length");
  c_ver->add_option("--lambda", ver.lambda, "Poisson intensity");
  c_ver->add_option("--reps", ver.reps, "Monte Carlo replications");
  c_ver->add_option("--realizations", ver.realizations,
                    "limit-sampler draw count");
  c_ver->add_option("--seed", ver.seed, "RNG seed");
  c_ver->add_option("--threads", ver.threads, "worker pool cap");
  c_ver->add_option("--ks-tolerance", ver.ks_tolerance,
                    "override the finite-n KS tolerance");
  c_ver->add_option("--out", ver.out_path, "report JSON path (default stdout)");

  LimitsArgs lim;
  CLI::App* c_lim = app.add_subcommand("limits", "sample a limit sup-measure");
  add_param_flags(c_lim, lim.flags);
  c_lim->add_option("--kind", lim.kind, "is|karlin|signal|critical|noise")
      ->required();
  c_lim->add_option("--samples,--reps", lim.samples,
                    "number of realizations");
  c_lim->add_option("--boxes", lim.boxes, "box list to evaluate");
  c_lim->add_option("--m-min", lim.m_min,
                    "certified minimum box measure (default: smallest box)");
  c_lim->add_option("--seed", lim.seed, "RNG seed");
  c_lim->add_option("--out", lim.out_path, "output CSV path (default stdout)");

  PlotdataArgs plot;
  CLI::App* c_plot = app.add_subcommand(
      "plotdata", "simulate one path and emit top-k marker files");
  add_param_flags(c_plot, plot.flags);
  c_plot->add_option("--n", plot.n, "path length");
  c_plot->add_option("--top", plot.top, "number of top markers");
  c_plot->add_option("--seed", plot.seed, "RNG seed");
  c_plot->add_option("--out", plot.out_path, "output base path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    // CLI11 returns 0 for --help/--version; anything else is usage error.
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (c_sim->parsed()) {
      note_param_presence(c_sim, sim.flags);
      return cmd_simulate(sim);
    }
    if (c_ver->parsed()) {
      note_param_presence(c_ver, ver.flags);
      ver.suite_set = c_ver->count("--suite") > 0;
      ver.boxes_set = c_ver->count("--boxes") > 0;
      ver.n_set = c_ver->count("--n") > 0;
      ver.lambda_set = c_ver->count("--lambda") > 0;
      ver.reps_set = c_ver->count("--reps") > 0;
      ver.realizations_set = c_ver->count("--realizations") > 0;
      ver.seed_set = c_ver->count("--seed") > 0;
      ver.threads_set = c_ver->count("--threads") > 0;
      ver.tol_set = c_ver->count("--ks-tolerance") > 0;
      ver.params_set = ver.flags.alpha_set || ver.flags.alpha_prime_set ||
                       ver.flags.beta_set ||
                       (!ver.flags.regime.empty() &&
                        ver.flags.regime != "auto");
      return cmd_verify(ver);
    }
    if (c_lim->parsed()) {
      note_param_presence(c_lim, lim.flags);
      return cmd_limits(lim);
    }
    if (c_plot->parsed()) {
      note_param_presence(c_plot, plot.flags);
      return cmd_plotdata(plot);
    }
  } catch (const std::length_error& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  }
  return kExitUsage;
}
