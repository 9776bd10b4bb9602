#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infobound/channels.hpp"
#include "infobound/common.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"

namespace infobound {

// Messages of a blackboard protocol: message(node i, round t) is what node i
// posted in round t.  Stored round-major in generation order.
struct Transcript {
  int n_nodes = 0;
  int n_rounds = 0;
  // messages[t][i]
  std::vector<std::vector<Vector>> messages;

  const Vector& message(int node, int round) const;
};

// Channel used by `node` in `round`, possibly depending on everything posted
// so far.  `so_far` contains the complete rounds < round plus the messages of
// nodes < node in the current round.
using ChannelFactory =
    std::function<std::shared_ptr<const Channel>(int node, int round, const Transcript& so_far)>;

struct ProtocolConfig {
  int n_nodes = 1;
  int n_rounds = 1;
  std::shared_ptr<const StatModel> model;
  ParamPoint theta;
  ChannelFactory channel_factory;
  std::uint64_t seed = 0;
  // Set by the caller when the factory ignores the transcript (true for all
  // one-round protocols built in this library).  Controls whether the
  // per-node mutual information sum is exact or only an upper-bound
  // surrogate for the transcript information.
  bool channels_transcript_independent = true;
};

// Factory that gives every node in every round the same fixed channel.
ChannelFactory homogeneous_channels(std::shared_ptr<const Channel> channel);

// Runs one protocol execution: draws X_1..X_n from the model, then generates
// messages round-major (round 1 node 1, node 2, ..., then round 2, ...).
// All randomness comes from `rng`, so (config, stream) determines the
// transcript exactly.
Transcript run_protocol(const ProtocolConfig& config, RngStream& rng);

// Mean of the round-1 messages; the standard estimator for location models
// under AWGN.  Throws std::invalid_argument on an empty transcript or
// mismatched message dimensions.
Vector averaging_estimator(const Transcript& transcript);

using Estimator = std::function<Vector(const Transcript&)>;

// Sum over nodes of I(X_i; message_i) for round-1 channels (in nats), and
// whether that sum is exact transcript information or only a surrogate.
struct TranscriptMiSummary {
  double total_nats = 0.0;
  bool is_surrogate = false;
};
TranscriptMiSummary total_transcript_mi(const ProtocolConfig& config);

// Supremum of total_transcript_mi over an axis-aligned grid of theta values
// in the model's admissible box (grid_points per coordinate).
double sup_total_transcript_mi(const ProtocolConfig& config, int grid_points = 11);

// Monte Carlo estimate of E || estimator(transcript) - theta ||^2 over
// independent protocol executions.  Trial t uses the substream t of
// RngStream(config.seed), so results are reproducible and independent of the
// thread count.  For Gaussian location models the result carries the minimax
// lower bound derived from sup_theta of the transcript information.
struct EstimationResult {
  std::string estimator;
  double empirical_mse = 0.0;
  // Standard error of the MSE estimate.
  double mse_std_error = 0.0;
  Vector mean_estimate;
  std::int64_t n_trials = 0;
  double mi_total_nats = 0.0;
  bool mi_is_surrogate = false;
  std::optional<double> lower_bound;
  std::optional<double> closed_form_mse;
  // lower_bound / empirical_mse when both are available.
  std::optional<double> tightness_ratio;
};
EstimationResult empirical_mse(const ProtocolConfig& config, const Estimator& estimator,
                               const std::string& estimator_name, std::int64_t n_trials);

// One-round protocol "scalar Gaussian nodes + AWGN + averaging":
// theta_hat = mean(Y_i), MSE = (sigma^2 + sigma_noise^2) / n in closed form.
// Compares the minimax lower bound against both the closed-form and the
// empirical MSE.  Uses a streaming sampler that draws the exact same random
// sequence as run_protocol but skips transcript materialization, so large
// (n, trials) runs stay fast.
struct TightnessResult {
  double ratio_closed_form = 0.0;  // lower_bound / closed_form_mse
  double ratio_empirical = 0.0;    // lower_bound / empirical_mse
  EstimationResult detail;
};
TightnessResult awgn_tightness_experiment(double sigma, double sigma_noise, int n_nodes,
                                          std::int64_t n_trials, std::uint64_t seed,
                                          double theta = 0.3);

}  // namespace infobound
