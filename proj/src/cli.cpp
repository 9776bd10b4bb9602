#include "infobound/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "infobound/bounds.hpp"
#include "infobound/distributed.hpp"
#include "infobound/fisher.hpp"
#include "infobound/info.hpp"

namespace infobound {

namespace {

constexpr double kLn2 = 0.6931471805599453;

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) parts.push_back(token);
  return parts;
}

double parse_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw SchemaError(field, "'" + s + "' is not a number");
  }
}

int parse_int(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw SchemaError(field, "'" + s + "' is not an integer");
  }
}

std::uint64_t require_seed(const ExperimentSpec& spec, const std::string& why) {
  if (!spec.seed) {
    throw SchemaError("seed", "--seed is required: " + why);
  }
  return *spec.seed;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

// Prints the summary to stdout and optionally writes the artifact file.  When
// no artifact path is given and CSV was requested, the CSV itself is the
// standard output payload.
void emit(const ExperimentSpec& spec, const Json& summary, const std::string& csv,
          std::ostream& out) {
  if (spec.format == "csv" && csv.empty()) {
    throw SchemaError("format", "csv output is not available for this command");
  }
  const std::string artifact = spec.format == "csv" ? csv : summary.dump(2) + "\n";
  if (!spec.out_path.empty()) {
    write_text_file(spec.out_path, artifact);
    out << summary.dump(2) << "\n";
  } else if (spec.format == "csv") {
    out << csv;
  } else {
    out << summary.dump(2) << "\n";
  }
}

int exit_from_verdicts(const std::vector<Verdict>& verdicts, bool allow_inconclusive,
                       std::ostream& err) {
  bool inconclusive = false;
  for (const Verdict v : verdicts) {
    if (v == Verdict::kViolated) return kExitBoundViolated;
    if (v == Verdict::kInconclusive) inconclusive = true;
  }
  if (inconclusive) {
    if (!allow_inconclusive) {
      err << "error: at least one bound is inconclusive (rerun with more samples or "
             "--allow-inconclusive)\n";
      return kExitBoundViolated;
    }
    err << "warning: at least one bound is inconclusive\n";
  }
  return kExitOk;
}

Vector required_theta(const ExperimentSpec& spec, const StatModel& model) {
  if (spec.theta.empty()) {
    throw SchemaError("theta", "a parameter point is required for this command");
  }
  const Vector theta = to_vector(spec.theta);
  try {
    model.validate_theta(theta);
  } catch (const std::invalid_argument& e) {
    throw SchemaError("theta", e.what());
  }
  return theta;
}

MiMode parse_mi_mode(const ExperimentSpec& spec) {
  if (spec.mi_method == "exact") return MiMode::kExact;
  if (spec.mi_method == "mc") return MiMode::kMonteCarlo;
  throw SchemaError("mi_method", "expected 'exact' or 'mc', got '" + spec.mi_method + "'");
}

std::string single_report_csv(const BoundReport& report, double param1, double param2) {
  std::ostringstream csv;
  write_sweep_csv(csv, {SweepRow{report.name, param1, param2, report}});
  return csv.str();
}

// --------------------------------------------------------------------------
// Subcommand handlers

int run_verify_fisher_bound(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const std::shared_ptr<StatModel> model = model_from_json(spec.model);
  const std::shared_ptr<Channel> channel = channel_from_json(spec.channel);
  const Vector theta = required_theta(spec, *model);
  const MiMode mode = parse_mi_mode(spec);

  std::unique_ptr<RngStream> rng;
  if (mode == MiMode::kMonteCarlo) {
    rng = std::make_unique<RngStream>(require_seed(spec, "mi_method=mc draws samples"));
  }
  const BoundReport report =
      verify_fisher_bound(*model, *channel, theta, mode, spec.mc_samples, rng.get());

  emit(spec, to_json(report), single_report_csv(report, theta[0], 0.0), out);
  return exit_from_verdicts({report.verdict}, spec.allow_inconclusive, err);
}

int run_capacity(const ExperimentSpec& spec, std::ostream& out, std::ostream&) {
  const std::shared_ptr<Channel> channel = channel_from_json(spec.channel);
  const auto* discrete = dynamic_cast<const DiscreteChannel*>(channel.get());
  if (discrete == nullptr) {
    throw SchemaError("channel", "capacity requires a discrete channel");
  }
  const CapacityResult result = capacity_blahut_arimoto(*discrete);
  emit(spec, to_json(result), "", out);
  return kExitOk;
}

int run_js_bound(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const std::shared_ptr<StatModel> model = model_from_json(spec.model);
  const std::shared_ptr<Channel> channel = channel_from_json(spec.channel);
  if (spec.theta0.empty() || spec.theta1.empty()) {
    throw SchemaError(spec.theta0.empty() ? "theta0" : "theta1",
                      "both path endpoints are required");
  }
  if (spec.n_nodes < 1) throw SchemaError("n_nodes", "must be >= 1");
  if (spec.quad_nodes < 1) throw SchemaError("quad_nodes", "must be >= 1");

  const PathSpec path =
      linear_path(to_vector(spec.theta0), to_vector(spec.theta1), spec.quad_nodes);
  try {
    model->validate_theta(path.theta0);
    model->validate_theta(path.theta1);
  } catch (const std::invalid_argument& e) {
    throw SchemaError("theta0", e.what());
  }

  // Declared sub-Gaussian parameter along the path: endpoints + quadrature nodes.
  double subgaussian_n = std::max(model->subgaussian_param(path.theta0),
                                  model->subgaussian_param(path.theta1));
  for (int k = 0; k < path.nodes.size(); ++k) {
    subgaussian_n =
        std::max(subgaussian_n, model->subgaussian_param(path_point(path, path.nodes[k])));
  }

  const MiMode mode = parse_mi_mode(spec);
  const bool discrete_pair = model->support() == Support::kDiscrete &&
                             dynamic_cast<const DiscreteChannel*>(channel.get()) != nullptr;
  double joint = 1.0;
  if (discrete_pair) {
    const auto* dc = dynamic_cast<const DiscreteChannel*>(channel.get());
    for (int i = 0; i < spec.n_nodes; ++i) joint *= dc->output_size();
  }
  const bool needs_mc = mode == MiMode::kMonteCarlo || !discrete_pair || joint > 4096.0;

  std::unique_ptr<RngStream> rng;
  if (needs_mc) {
    rng = std::make_unique<RngStream>(
        require_seed(spec, "this model/channel pair needs Monte Carlo"));
  }
  const BoundReport report = verify_js_bound(*model, *channel, spec.n_nodes, path,
                                             subgaussian_n, mode, spec.mc_samples, rng.get());

  emit(spec, to_json(report), single_report_csv(report, path.theta0[0], path.theta1[0]), out);
  return exit_from_verdicts({report.verdict}, spec.allow_inconclusive, err);
}

// Consistency of "lower bound <= achieved MSE" given the Monte Carlo noise
// on the empirical MSE.
BoundReport lower_bound_consistency(const EstimationResult& result) {
  const double lower = result.lower_bound.value_or(0.0);
  return make_bound_report("minimax_lower_bound_vs_mse", lower, result.empirical_mse,
                           result.mse_std_error,
                           {{"lower_bound", lower},
                            {"empirical_mse", result.empirical_mse},
                            {"mse_std_error", result.mse_std_error}});
}

std::string distributed_csv(const std::string& group, const ProtocolConfig& config,
                            const EstimationResult& result) {
  DistributedRow row;
  row.trial_group = group;
  row.n = config.n_nodes;
  if (const auto* g = dynamic_cast<const GaussianLocation*>(config.model.get())) {
    row.sigma = g->sigma();
  }
  Transcript empty;
  empty.n_nodes = config.n_nodes;
  empty.n_rounds = 0;
  const std::shared_ptr<const Channel> first = config.channel_factory(0, 0, empty);
  if (const auto* awgn = dynamic_cast<const AwgnChannel*>(first.get())) {
    row.sigma_noise = awgn->sigma_noise();
  }
  row.result = result;
  std::ostringstream csv;
  write_distributed_csv(csv, {row});
  return csv.str();
}

int run_simulate_distributed(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const std::shared_ptr<StatModel> model = model_from_json(spec.model);
  const std::shared_ptr<Channel> channel = channel_from_json(spec.channel);
  if (spec.n_nodes < 1) throw SchemaError("n_nodes", "must be >= 1");
  if (spec.n_rounds < 1) throw SchemaError("n_rounds", "must be >= 1");
  if (spec.n_trials < 2) throw SchemaError("n_trials", "must be >= 2");

  ProtocolConfig config;
  config.n_nodes = spec.n_nodes;
  config.n_rounds = spec.n_rounds;
  config.model = model;
  config.theta = required_theta(spec, *model);
  config.channel_factory = homogeneous_channels(channel);
  config.seed = require_seed(spec, "the simulation draws samples");

  const EstimationResult result = empirical_mse(config, averaging_estimator, "averaging",
                                                spec.n_trials);

  Json summary = to_json(result);
  std::vector<Verdict> verdicts;
  if (result.lower_bound) {
    const BoundReport consistency = lower_bound_consistency(result);
    summary["consistency"] = to_json(consistency);
    verdicts.push_back(consistency.verdict);
  }
  emit(spec, summary, distributed_csv("simulate", config, result), out);
  return exit_from_verdicts(verdicts, spec.allow_inconclusive, err);
}

int run_tightness(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.n_nodes < 1) throw SchemaError("n_nodes", "must be >= 1");
  if (spec.n_trials < 2) throw SchemaError("n_trials", "must be >= 2");
  const double theta = spec.theta.empty() ? 0.3 : spec.theta.front();
  const std::uint64_t seed = require_seed(spec, "the experiment draws samples");

  const TightnessResult result = awgn_tightness_experiment(
      spec.sigma, spec.sigma_noise, spec.n_nodes, spec.n_trials, seed, theta);

  Json summary = to_json(result);
  std::vector<Verdict> verdicts;
  if (result.detail.lower_bound) {
    const BoundReport consistency = lower_bound_consistency(result.detail);
    summary["consistency"] = to_json(consistency);
    verdicts.push_back(consistency.verdict);
  }

  ProtocolConfig config;
  config.n_nodes = spec.n_nodes;
  config.model = std::make_shared<GaussianLocation>(spec.sigma, 1);
  config.theta = Vector::Constant(1, theta);
  config.channel_factory =
      homogeneous_channels(std::make_shared<AwgnChannel>(spec.sigma_noise, 1));
  emit(spec, summary, distributed_csv("tightness", config, result.detail), out);
  return exit_from_verdicts(verdicts, spec.allow_inconclusive, err);
}

int run_report(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  std::vector<SweepRow> rows;
  const BernoulliModel bernoulli;

  // Fisher-information bound across the standard grids.
  for (int ti = 1; ti <= 9; ++ti) {
    const double theta = 0.1 * ti;
    for (int pi = 0; pi <= 10; ++pi) {
      const double p = 0.05 * pi;
      const DiscreteChannel channel = bsc(p);
      const BoundReport report =
          verify_fisher_bound(bernoulli, channel, Vector::Constant(1, theta));
      rows.push_back({"fisher_mi:bernoulli_bsc", theta, p, report});
    }
  }
  for (const double sigma : {0.5, 1.0, 2.0}) {
    const GaussianLocation model(sigma, 1);
    for (int si = 1; si <= 16; ++si) {
      const double sigma_noise = 0.25 * si;
      const AwgnChannel channel(sigma_noise, 1);
      const BoundReport report =
          verify_fisher_bound(model, channel, Vector::Constant(1, 0.3));
      rows.push_back({"fisher_mi:gaussian_awgn", sigma, sigma_noise, report});
    }
  }
  {
    const GaussianLocation model(1.0, 1);
    for (int bits = 1; bits <= 4; ++bits) {
      const QuantizerChannel channel(bits, -1.0, 1.0, false);
      const Vector theta = Vector::Constant(1, 0.3);
      rows.push_back({"fisher_mi:gaussian_quantizer", static_cast<double>(bits), 0.3,
                      verify_fisher_bound(model, channel, theta)});
      // Deterministic k-bit output also obeys I(X;Y) = H(Y) <= k ln 2.
      const MIEstimate mi = mi_gaussian_quantizer(model, channel, theta);
      rows.push_back({"quantizer_mi_vs_klog2", static_cast<double>(bits), 0.3,
                      make_bound_report("quantizer_mi_vs_klog2", mi.value, bits * kLn2, 0.0,
                                        {{"mi_nats", mi.value}})});
    }
  }
  {
    const Vector theta = Vector::Constant(1, 0.5);
    for (int ei = 1; ei <= 30; ++ei) {
      const double epsilon = 0.1 * ei;
      const RandomizedResponseChannel channel(epsilon);
      rows.push_back({"fisher_mi:bernoulli_rr", 0.5, epsilon,
                      verify_fisher_bound(bernoulli, channel, theta)});
      // Private responses carry at most epsilon nats about the input.
      const MIEstimate mi = mi_exact_discrete(bernoulli, channel, theta);
      rows.push_back({"rr_mi_vs_epsilon", 0.5, epsilon,
                      make_bound_report("rr_mi_vs_epsilon", mi.value, epsilon, 0.0,
                                        {{"mi_nats", mi.value}})});
    }
  }

  std::ostringstream csv;
  write_sweep_csv(csv, rows);

  std::vector<Verdict> verdicts;
  int holds = 0, violated = 0, inconclusive = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  Json worst;
  for (const SweepRow& row : rows) {
    verdicts.push_back(row.report.verdict);
    switch (row.report.verdict) {
      case Verdict::kHolds: ++holds; break;
      case Verdict::kViolated: ++violated; break;
      case Verdict::kInconclusive: ++inconclusive; break;
    }
    if (row.report.slack < min_slack) {
      min_slack = row.report.slack;
      worst = to_json(row.report);
      worst["param1"] = row.param1;
      worst["param2"] = row.param2;
    }
  }
  const Json summary{{"rows", rows.size()},
                     {"holds", holds},
                     {"violated", violated},
                     {"inconclusive", inconclusive},
                     {"min_slack", min_slack},
                     {"tightest", worst}};
  emit(spec, summary, csv.str(), out);
  return exit_from_verdicts(verdicts, spec.allow_inconclusive, err);
}

}  // namespace

ExperimentSpec spec_from_config_json(const Json& config) {
  if (!config.is_object()) throw SchemaError("config", "expected a JSON object");
  ExperimentSpec spec;
  const std::string command = require_string(config, "command", "config");
  if (command == "verify-fisher-bound") {
    spec.command = CliCommand::kVerifyFisherBound;
  } else if (command == "capacity") {
    spec.command = CliCommand::kCapacity;
  } else if (command == "js-bound") {
    spec.command = CliCommand::kJsBound;
  } else if (command == "simulate-distributed") {
    spec.command = CliCommand::kSimulateDistributed;
  } else if (command == "tightness") {
    spec.command = CliCommand::kTightness;
  } else if (command == "report") {
    spec.command = CliCommand::kReport;
  } else {
    throw SchemaError("config.command", "unknown command '" + command + "'");
  }

  auto read_theta = [&config](const char* key, std::vector<double>& into) {
    if (!config.contains(key)) return;
    const Json& v = config[key];
    if (v.is_number()) {
      into = {v.get<double>()};
    } else if (v.is_array()) {
      into.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
          throw SchemaError("config." + std::string(key) + "[" + std::to_string(i) + "]",
                            "expected a number");
        }
        into.push_back(v[i].get<double>());
      }
    } else {
      throw SchemaError("config." + std::string(key), "expected a number or array");
    }
  };

  if (config.contains("model")) spec.model = config["model"];
  if (config.contains("channel")) spec.channel = config["channel"];
  read_theta("theta", spec.theta);
  read_theta("theta0", spec.theta0);
  read_theta("theta1", spec.theta1);

  auto read_number = [&config](const char* key, auto& into) {
    if (!config.contains(key)) return;
    if (!config[key].is_number()) {
      throw SchemaError("config." + std::string(key), "expected a number");
    }
    into = config[key].get<std::decay_t<decltype(into)>>();
  };
  read_number("sigma", spec.sigma);
  read_number("sigma_noise", spec.sigma_noise);
  read_number("n_nodes", spec.n_nodes);
  read_number("n_rounds", spec.n_rounds);
  read_number("n_trials", spec.n_trials);
  read_number("mc_samples", spec.mc_samples);
  read_number("quad_nodes", spec.quad_nodes);
  if (config.contains("seed")) {
    if (!config["seed"].is_number_unsigned() && !config["seed"].is_number_integer()) {
      throw SchemaError("config.seed", "expected a nonnegative integer");
    }
    spec.seed = config["seed"].get<std::uint64_t>();
  }
  if (config.contains("mi_method")) {
    spec.mi_method = require_string(config, "mi_method", "config");
  }
  if (config.contains("format")) spec.format = require_string(config, "format", "config");
  if (config.contains("out")) spec.out_path = require_string(config, "out", "config");
  if (config.contains("allow_inconclusive")) {
    if (!config["allow_inconclusive"].is_boolean()) {
      throw SchemaError("config.allow_inconclusive", "expected a boolean");
    }
    spec.allow_inconclusive = config["allow_inconclusive"].get<bool>();
  }
  return spec;
}

Json parse_model_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    try {
      return Json::parse(arg);
    } catch (const Json::parse_error& e) {
      throw SchemaError("model", std::string("invalid JSON: ") + e.what());
    }
  }
  const std::vector<std::string> parts = split(arg, ':');
  if (parts.empty()) throw SchemaError("model", "empty model descriptor");
  if (parts[0] == "bernoulli" && parts.size() == 1) {
    return Json{{"family", "bernoulli"}};
  }
  if (parts[0] == "gaussian" && parts.size() <= 3) {
    Json j{{"family", "gaussian_location"},
           {"sigma", parts.size() > 1 ? parse_double(parts[1], "model.sigma") : 1.0}};
    if (parts.size() > 2) j["dim"] = parse_int(parts[2], "model.dim");
    return j;
  }
  throw SchemaError("model", "unrecognized descriptor '" + arg +
                                 "' (use bernoulli, gaussian[:sigma[:dim]], or inline JSON)");
}

Json parse_channel_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    try {
      return Json::parse(arg);
    } catch (const Json::parse_error& e) {
      throw SchemaError("channel", std::string("invalid JSON: ") + e.what());
    }
  }
  const std::vector<std::string> parts = split(arg, ':');
  if (parts.empty()) throw SchemaError("channel", "empty channel descriptor");
  const std::string& kind = parts[0];
  if (kind == "bsc" && parts.size() == 2) {
    return Json{{"channel", "bsc"}, {"p", parse_double(parts[1], "channel.p")}};
  }
  if (kind == "bec" && parts.size() == 2) {
    return Json{{"channel", "bec"}, {"epsilon", parse_double(parts[1], "channel.epsilon")}};
  }
  if (kind == "rr" && parts.size() == 2) {
    return Json{{"channel", "rr"}, {"epsilon", parse_double(parts[1], "channel.epsilon")}};
  }
  if (kind == "awgn" && (parts.size() == 2 || parts.size() == 3)) {
    Json j{{"channel", "awgn"}, {"sigma_noise", parse_double(parts[1], "channel.sigma_noise")}};
    if (parts.size() == 3) j["dim"] = parse_int(parts[2], "channel.dim");
    return j;
  }
  if (kind == "identity" && parts.size() == 2) {
    return Json{{"channel", "identity"}, {"size", parse_int(parts[1], "channel.size")}};
  }
  if (kind == "quantizer" && (parts.size() == 4 || parts.size() == 5)) {
    if (parts.size() == 5 && parts[4] != "dither") {
      throw SchemaError("channel", "quantizer modifier must be 'dither'");
    }
    return Json{{"channel", "quantizer"},
                {"bits", parse_int(parts[1], "channel.bits")},
                {"range", Json::array({parse_double(parts[2], "channel.range"),
                                       parse_double(parts[3], "channel.range")})},
                {"dither", parts.size() == 5}};
  }
  throw SchemaError("channel",
                    "unrecognized descriptor '" + arg +
                        "' (use bsc:P, bec:E, rr:E, awgn:S[:D], identity:N, "
                        "quantizer:BITS:LO:HI[:dither], or inline JSON)");
}

int run_command(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    switch (spec.command) {
      case CliCommand::kVerifyFisherBound: return run_verify_fisher_bound(spec, out, err);
      case CliCommand::kCapacity: return run_capacity(spec, out, err);
      case CliCommand::kJsBound: return run_js_bound(spec, out, err);
      case CliCommand::kSimulateDistributed: return run_simulate_distributed(spec, out, err);
      case CliCommand::kTightness: return run_tightness(spec, out, err);
      case CliCommand::kReport: return run_report(spec, out, err);
    }
    err << "error: unknown command\n";
    return kExitSchemaError;
  } catch (const SchemaError& e) {
    err << "schema error at " << e.field_path() << ": " << e.what() << "\n";
    return kExitSchemaError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchemaError;
  }
}

}  // namespace infobound
