#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infobound/serialize.hpp"

namespace infobound {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundViolated = 1;
inline constexpr int kExitSchemaError = 2;

enum class CliCommand {
  kVerifyFisherBound,
  kCapacity,
  kJsBound,
  kSimulateDistributed,
  kTightness,
  kReport,
};

// Fully resolved invocation of one subcommand.  Built either from
// command-line flags or from a JSON config document.
struct ExperimentSpec {
  CliCommand command = CliCommand::kReport;

  Json model;    // model descriptor (may be null where not needed)
  Json channel;  // channel descriptor
  std::vector<double> theta;
  std::vector<double> theta0;
  std::vector<double> theta1;

  double sigma = 1.0;
  double sigma_noise = 1.0;
  int n_nodes = 1;
  int n_rounds = 1;
  std::int64_t n_trials = 100000;
  std::int64_t mc_samples = 1000000;
  int quad_nodes = 16;
  std::optional<std::uint64_t> seed;
  std::string mi_method = "exact";  // "exact" | "mc"
  std::string format = "json";      // "json" | "csv"
  std::string out_path;             // extra artifact path; stdout always gets the summary
  bool allow_inconclusive = false;
};

// Parses {"command": ..., ...} into a spec; throws SchemaError on bad input.
ExperimentSpec spec_from_config_json(const Json& config);

// Compact descriptor strings accepted on the command line, e.g.
// "bernoulli", "gaussian:0.5:3", "bsc:0.25", "awgn:1.0", "rr:0.7",
// "quantizer:3:-1:1[:dither]", "bec:0.3", "identity:4", or inline JSON.
Json parse_model_arg(const std::string& arg);
Json parse_channel_arg(const std::string& arg);

// Executes the experiment, writing the machine-readable summary to `out` and
// diagnostics to `err`.  Returns an exit code: 0 when every checked bound
// holds, 1 when a bound is violated (or inconclusive without
// allow_inconclusive), 2 on schema or validation errors.
int run_command(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace infobound
