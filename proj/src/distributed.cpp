#include "infobound/distributed.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "infobound/bounds.hpp"
#include "infobound/info.hpp"

namespace infobound {

namespace {

constexpr std::int64_t kTrialChunk = 256;

const GaussianLocation* as_gaussian(const StatModel& model) {
  return dynamic_cast<const GaussianLocation*>(&model);
}

void validate_config(const ProtocolConfig& config) {
  if (!config.model) throw std::invalid_argument("protocol: model is null");
  if (!config.channel_factory) throw std::invalid_argument("protocol: channel factory is null");
  if (config.n_nodes < 1) throw std::invalid_argument("protocol: n_nodes must be >= 1");
  if (config.n_rounds < 1) throw std::invalid_argument("protocol: n_rounds must be >= 1");
  config.model->validate_theta(config.theta);
}

}  // namespace

const Vector& Transcript::message(int node, int round) const {
  if (round < 0 || round >= n_rounds || node < 0 || node >= n_nodes) {
    throw std::out_of_range("Transcript::message: node/round out of range");
  }
  return messages[static_cast<std::size_t>(round)][static_cast<std::size_t>(node)];
}

ChannelFactory homogeneous_channels(std::shared_ptr<const Channel> channel) {
  if (!channel) throw std::invalid_argument("homogeneous_channels: channel is null");
  return [channel](int, int, const Transcript&) { return channel; };
}

Transcript run_protocol(const ProtocolConfig& config, RngStream& rng) {
  validate_config(config);

  // Draw all node samples first, then fill the blackboard round-major.
  std::vector<Vector> samples;
  samples.reserve(static_cast<std::size_t>(config.n_nodes));
  for (int i = 0; i < config.n_nodes; ++i) {
    samples.push_back(config.model->sample(config.theta, rng));
  }

  Transcript transcript;
  transcript.n_nodes = config.n_nodes;
  transcript.n_rounds = 0;
  for (int t = 0; t < config.n_rounds; ++t) {
    transcript.messages.emplace_back();
    transcript.messages.back().reserve(static_cast<std::size_t>(config.n_nodes));
    for (int i = 0; i < config.n_nodes; ++i) {
      const std::shared_ptr<const Channel> channel = config.channel_factory(i, t, transcript);
      if (!channel) throw std::invalid_argument("protocol: channel factory returned null");
      transcript.messages.back().push_back(channel->sample(samples[static_cast<std::size_t>(i)], rng));
    }
    transcript.n_rounds = t + 1;
  }
  return transcript;
}

Vector averaging_estimator(const Transcript& transcript) {
  if (transcript.n_rounds < 1 || transcript.n_nodes < 1) {
    throw std::invalid_argument("averaging_estimator: empty transcript");
  }
  const auto& round = transcript.messages.front();
  Vector sum = round.front();
  for (std::size_t i = 1; i < round.size(); ++i) {
    if (round[i].size() != sum.size()) {
      throw std::invalid_argument("averaging_estimator: messages have mismatched dimensions");
    }
    sum += round[i];
  }
  return sum / static_cast<double>(round.size());
}

TranscriptMiSummary total_transcript_mi(const ProtocolConfig& config) {
  validate_config(config);
  Transcript empty;
  empty.n_nodes = config.n_nodes;
  empty.n_rounds = 0;

  TranscriptMiSummary summary;
  for (int i = 0; i < config.n_nodes; ++i) {
    const std::shared_ptr<const Channel> channel = config.channel_factory(i, 0, empty);
    summary.total_nats += mutual_information(*config.model, *channel, config.theta).value;
  }
  // With several rounds (or transcript-coupled channels) the per-node sum
  // over round-1 channels only upper-bound-surrogates the transcript MI.
  summary.is_surrogate =
      config.n_rounds > 1 || !config.channels_transcript_independent;
  return summary;
}

double sup_total_transcript_mi(const ProtocolConfig& config, int grid_points) {
  validate_config(config);
  if (grid_points < 1) {
    throw std::invalid_argument("sup_total_transcript_mi: grid_points must be >= 1");
  }
  const int d = static_cast<int>(config.theta.size());
  if (d > 3) {
    throw std::invalid_argument("sup_total_transcript_mi: grid search limited to d <= 3");
  }

  // Axis-aligned grid over the admissible box; points that fail model
  // validation (e.g. box corners outside an open domain) are skipped.
  std::vector<double> axis(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) {
    axis[static_cast<std::size_t>(k)] =
        grid_points == 1 ? 0.0 : -1.0 + 2.0 * k / (grid_points - 1);
  }

  double sup = 0.0;
  bool any = false;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    ParamPoint theta(d);
    for (int j = 0; j < d; ++j) theta[j] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
    try {
      ProtocolConfig probe = config;
      probe.theta = theta;
      const double total = total_transcript_mi(probe).total_nats;
      sup = any ? std::max(sup, total) : total;
      any = true;
    } catch (const std::invalid_argument&) {
      // theta outside the model's admissible set; skip this grid point.
    }
    int j = 0;
    while (j < d && ++idx[static_cast<std::size_t>(j)] == grid_points) {
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == d) break;
  }
  if (!any) {
    throw std::invalid_argument("sup_total_transcript_mi: no admissible grid point");
  }
  return sup;
}

namespace {

struct TrialPartial {
  MeanAccumulator sq_error;
  Vector estimate_sum;

  void merge(const TrialPartial& o) {
    sq_error.merge(o.sq_error);
    if (estimate_sum.size() == 0) {
      estimate_sum = o.estimate_sum;
    } else if (o.estimate_sum.size() != 0) {
      estimate_sum += o.estimate_sum;
    }
  }
};

void attach_lower_bound(const ProtocolConfig& config, EstimationResult& result) {
  const auto* g = as_gaussian(*config.model);
  if (g == nullptr) return;
  const double sup_mi = sup_total_transcript_mi(config);
  result.lower_bound = van_trees_lower_bound(g->dim(), g->sigma(), sup_mi);
  if (result.empirical_mse > 0.0) {
    result.tightness_ratio = *result.lower_bound / result.empirical_mse;
  }
}

}  // namespace

EstimationResult empirical_mse(const ProtocolConfig& config, const Estimator& estimator,
                               const std::string& estimator_name, std::int64_t n_trials) {
  validate_config(config);
  if (!estimator) throw std::invalid_argument("empirical_mse: estimator is null");
  if (n_trials < 2) throw std::invalid_argument("empirical_mse: need at least 2 trials");

  const RngStream base(config.seed);
  const auto partial = chunked_reduce<TrialPartial>(
      n_trials, kTrialChunk, default_thread_count(),
      [&](std::int64_t begin, std::int64_t end, TrialPartial& out) {
        out.estimate_sum = Vector::Zero(config.theta.size());
        for (std::int64_t trial = begin; trial < end; ++trial) {
          RngStream stream = base.substream(static_cast<std::uint64_t>(trial));
          const Transcript transcript = run_protocol(config, stream);
          const Vector estimate = estimator(transcript);
          if (estimate.size() != config.theta.size()) {
            throw std::invalid_argument("empirical_mse: estimator dimension mismatch");
          }
          out.sq_error.add((estimate - config.theta).squaredNorm());
          out.estimate_sum += estimate;
        }
      });

  EstimationResult result;
  result.estimator = estimator_name;
  result.empirical_mse = partial.sq_error.mean();
  result.mse_std_error = partial.sq_error.std_error();
  result.mean_estimate = partial.estimate_sum / static_cast<double>(n_trials);
  result.n_trials = n_trials;
  const TranscriptMiSummary mi = total_transcript_mi(config);
  result.mi_total_nats = mi.total_nats;
  result.mi_is_surrogate = mi.is_surrogate;
  attach_lower_bound(config, result);
  return result;
}

TightnessResult awgn_tightness_experiment(double sigma, double sigma_noise, int n_nodes,
                                          std::int64_t n_trials, std::uint64_t seed,
                                          double theta) {
  if (n_nodes < 1) {
    throw std::invalid_argument("awgn_tightness_experiment: n_nodes must be >= 1");
  }
  if (n_trials < 2) {
    throw std::invalid_argument("awgn_tightness_experiment: need at least 2 trials");
  }
  const auto model = std::make_shared<GaussianLocation>(sigma, 1);
  const auto channel = std::make_shared<AwgnChannel>(sigma_noise, 1);

  ProtocolConfig config;
  config.n_nodes = n_nodes;
  config.n_rounds = 1;
  config.model = model;
  config.theta = Vector::Constant(1, theta);
  config.channel_factory = homogeneous_channels(channel);
  config.seed = seed;
  model->validate_theta(config.theta);

  // Streaming replica of run_protocol + averaging_estimator for this one
  // protocol shape: identical draw order (n model normals, then n channel
  // normals per trial), no transcript allocation.
  const RngStream base(seed);
  const auto partial = chunked_reduce<TrialPartial>(
      n_trials, kTrialChunk, default_thread_count(),
      [&](std::int64_t begin, std::int64_t end, TrialPartial& out) {
        std::vector<double> x(static_cast<std::size_t>(n_nodes));
        out.estimate_sum = Vector::Zero(1);
        for (std::int64_t trial = begin; trial < end; ++trial) {
          RngStream stream = base.substream(static_cast<std::uint64_t>(trial));
          for (int i = 0; i < n_nodes; ++i) {
            x[static_cast<std::size_t>(i)] = theta + sigma * stream.normal();
          }
          double sum_y = 0.0;
          for (int i = 0; i < n_nodes; ++i) {
            sum_y += x[static_cast<std::size_t>(i)] + sigma_noise * stream.normal();
          }
          const double estimate = sum_y / static_cast<double>(n_nodes);
          const double err = estimate - theta;
          out.sq_error.add(err * err);
          out.estimate_sum[0] += estimate;
        }
      });

  EstimationResult detail;
  detail.estimator = "averaging";
  detail.empirical_mse = partial.sq_error.mean();
  detail.mse_std_error = partial.sq_error.std_error();
  detail.mean_estimate = partial.estimate_sum / static_cast<double>(n_trials);
  detail.n_trials = n_trials;
  const TranscriptMiSummary mi = total_transcript_mi(config);
  detail.mi_total_nats = mi.total_nats;
  detail.mi_is_surrogate = mi.is_surrogate;
  detail.closed_form_mse =
      (sigma * sigma + sigma_noise * sigma_noise) / static_cast<double>(n_nodes);
  attach_lower_bound(config, detail);

  TightnessResult result;
  result.detail = detail;
  if (detail.lower_bound) {
    result.ratio_closed_form = *detail.lower_bound / *detail.closed_form_mse;
    result.ratio_empirical = *detail.lower_bound / detail.empirical_mse;
  }
  return result;
}

}  // namespace infobound
