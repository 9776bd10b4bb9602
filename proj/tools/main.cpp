#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infobound/cli.hpp"

namespace {

using infobound::ExperimentSpec;

struct RawArgs {
  std::string model;
  std::string channel;
  std::vector<double> theta, theta0, theta1;
};

void add_common_flags(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--seed", [&spec](const std::vector<std::string>& values) {
       spec.seed = std::stoull(values.front());
       return true;
     },
     "RNG seed (required for any Monte Carlo computation)")
      ->expected(1);
  cmd->add_option("--format", spec.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", spec.out_path, "Write the artifact to this file");
  cmd->add_flag("--allow-inconclusive", spec.allow_inconclusive,
                "Treat inconclusive verdicts as warnings instead of failures");
}

void add_model_channel_flags(CLI::App* cmd, RawArgs& raw, bool need_model) {
  if (need_model) {
    cmd->add_option("--model", raw.model,
                    "Model descriptor (bernoulli, gaussian[:sigma[:dim]], or JSON)")
        ->required();
  }
  cmd->add_option("--channel", raw.channel,
                  "Channel descriptor (bsc:P, bec:E, rr:E, awgn:S[:D], identity:N, "
                  "quantizer:BITS:LO:HI[:dither], or JSON)")
      ->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "infobound: Fisher information, mutual information, and minimax lower bounds\n"
      "for samples observed through information-constrained channels"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "Run from a JSON config file instead of flags");

  ExperimentSpec spec;
  RawArgs raw;

  CLI::App* verify = app.add_subcommand(
      "verify-fisher-bound", "Check Tr I_Y <= 2 N^2 I(X;Y) for a model/channel pair");
  add_model_channel_flags(verify, raw, true);
  verify->add_option("--theta", raw.theta, "Parameter point (comma separated)")
      ->required()
      ->delimiter(',');
  verify->add_option("--mi-method", spec.mi_method, "Mutual information method: exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  verify->add_option("--mc-samples", spec.mc_samples, "Monte Carlo sample count");
  add_common_flags(verify, spec);

  CLI::App* capacity =
      app.add_subcommand("capacity", "Channel capacity of a discrete channel (nats)");
  add_model_channel_flags(capacity, raw, false);
  add_common_flags(capacity, spec);

  CLI::App* js = app.add_subcommand(
      "js-bound", "Check the Jensen-Shannon two-point bound along a parameter path");
  add_model_channel_flags(js, raw, true);
  js->add_option("--theta0", raw.theta0, "Path start")->required()->delimiter(',');
  js->add_option("--theta1", raw.theta1, "Path end")->required()->delimiter(',');
  js->add_option("--n", spec.n_nodes, "Number of independent nodes");
  js->add_option("--quad-nodes", spec.quad_nodes, "Quadrature nodes along the path");
  js->add_option("--mi-method", spec.mi_method, "Mutual information method: exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  js->add_option("--mc-samples", spec.mc_samples, "Monte Carlo sample count");
  add_common_flags(js, spec);

  CLI::App* simulate = app.add_subcommand(
      "simulate-distributed", "Estimate theta from a simulated one-round protocol");
  add_model_channel_flags(simulate, raw, true);
  simulate->add_option("--theta", raw.theta, "Parameter point")->required()->delimiter(',');
  simulate->add_option("--n", spec.n_nodes, "Number of nodes");
  simulate->add_option("--rounds", spec.n_rounds, "Number of rounds");
  simulate->add_option("--trials", spec.n_trials, "Number of Monte Carlo trials");
  add_common_flags(simulate, spec);

  CLI::App* tightness = app.add_subcommand(
      "tightness", "Lower-bound tightness for Gaussian nodes over AWGN with averaging");
  tightness->add_option("--sigma", spec.sigma, "Model scale sigma");
  tightness->add_option("--sigma-noise", spec.sigma_noise, "Channel noise scale");
  tightness->add_option("--n", spec.n_nodes, "Number of nodes");
  tightness->add_option("--trials", spec.n_trials, "Number of Monte Carlo trials");
  tightness->add_option("--theta", raw.theta, "Parameter point (default 0.3)")->delimiter(',');
  add_common_flags(tightness, spec);

  CLI::App* report = app.add_subcommand(
      "report", "Run the standard verification sweep and emit per-cell results");
  add_common_flags(report, spec);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return infobound::kExitSchemaError;
      }
      infobound::Json config;
      try {
        in >> config;
      } catch (const infobound::Json::parse_error& e) {
        std::cerr << "schema error at config: invalid JSON: " << e.what() << "\n";
        return infobound::kExitSchemaError;
      }
      return infobound::run_command(infobound::spec_from_config_json(config), std::cout,
                                    std::cerr);
    }

    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return infobound::kExitSchemaError;
    }

    if (verify->parsed()) spec.command = infobound::CliCommand::kVerifyFisherBound;
    if (capacity->parsed()) spec.command = infobound::CliCommand::kCapacity;
    if (js->parsed()) spec.command = infobound::CliCommand::kJsBound;
    if (simulate->parsed()) spec.command = infobound::CliCommand::kSimulateDistributed;
    if (tightness->parsed()) spec.command = infobound::CliCommand::kTightness;
    if (report->parsed()) spec.command = infobound::CliCommand::kReport;

    if (!raw.model.empty()) spec.model = infobound::parse_model_arg(raw.model);
    if (!raw.channel.empty()) spec.channel = infobound::parse_channel_arg(raw.channel);
    spec.theta = raw.theta;
    spec.theta0 = raw.theta0;
    spec.theta1 = raw.theta1;

    return infobound::run_command(spec, std::cout, std::cerr);
  } catch (const infobound::SchemaError& e) {
    std::cerr << "schema error at " << e.field_path() << ": " << e.what() << "\n";
    return infobound::kExitSchemaError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return infobound::kExitSchemaError;
  }
}
