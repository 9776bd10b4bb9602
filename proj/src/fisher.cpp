#include "infobound/fisher.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "infobound/info.hpp"

namespace infobound {

namespace {

constexpr double kMassFloor = 1e-300;
constexpr std::int64_t kMcChunk = 65536;

const GaussianLocation* as_gaussian(const StatModel& model) {
  return dynamic_cast<const GaussianLocation*>(&model);
}

// Per-output gradient columns dm(y) = sum_x W(x, y) p(x) S(x) of the output
// pmf, computed analytically from the score table when available, otherwise
// by central finite differences of ln m(y).
Matrix output_pmf_gradient(const StatModel& model, const DiscreteChannel& channel,
                           const ParamPoint& theta, const Vector& m, double fd_step,
                           std::string* method) {
  try {
    const Vector p = model.pmf(theta);
    const Matrix s = model.score_table(theta);
    *method = "exact_discrete";
    return s * p.asDiagonal() * channel.matrix();
  } catch (const std::logic_error&) {
    // No analytic score table: differentiate ln m numerically.
  }
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("fisher_output_exact: fd_step must be positive");
  }
  const int d = model.dim();
  Matrix grad(d, m.size());
  for (int j = 0; j < d; ++j) {
    ParamPoint tp = theta, tm = theta;
    tp[j] += fd_step;
    tm[j] -= fd_step;
    const Vector mp = push_forward_discrete(model, channel, tp);
    const Vector mm = push_forward_discrete(model, channel, tm);
    for (int y = 0; y < m.size(); ++y) {
      if (m[y] < kMassFloor) {
        grad(j, y) = 0.0;
      } else {
        // d ln m / d theta_j times m(y)
        grad(j, y) = m[y] * (std::log(mp[y]) - std::log(mm[y])) / (2.0 * fd_step);
      }
    }
  }
  *method = "finite_difference";
  return grad;
}

}  // namespace

FisherMatrix fisher_input(const StatModel& model, const ParamPoint& theta) {
  model.validate_theta(theta);
  FisherMatrix f;
  f.theta = theta;

  if (const auto* g = as_gaussian(model)) {
    f.entries = Matrix::Identity(g->dim(), g->dim()) / (g->sigma() * g->sigma());
    f.method = "closed_form_gaussian";
    return f;
  }
  if (model.support() == Support::kDiscrete) {
    const Vector p = model.pmf(theta);
    const Matrix s = model.score_table(theta);
    f.entries = s * p.asDiagonal() * s.transpose();
    f.method = "exact_discrete";
    return f;
  }
  throw std::invalid_argument("fisher_input: no exact method for this model");
}

FisherMatrix fisher_output_exact(const StatModel& model, const DiscreteChannel& channel,
                                 const ParamPoint& theta, double fd_step, int* dropped_outputs) {
  if (model.support() != Support::kDiscrete) {
    throw std::invalid_argument("fisher_output_exact: model must have discrete support");
  }
  model.validate_theta(theta);
  const Vector m = push_forward_discrete(model, channel, theta);

  FisherMatrix f;
  f.theta = theta;
  const Matrix grad = output_pmf_gradient(model, channel, theta, m, fd_step, &f.method);

  const int d = model.dim();
  Matrix info = Matrix::Zero(d, d);
  int dropped = 0;
  for (int y = 0; y < m.size(); ++y) {
    if (m[y] < kMassFloor) {
      ++dropped;
      continue;
    }
    info.noalias() += grad.col(y) * grad.col(y).transpose() / m[y];
  }
  if (dropped_outputs != nullptr) *dropped_outputs = dropped;
  f.entries = info;
  return f;
}

FisherMatrix fisher_output(const StatModel& model, const Channel& channel,
                           const ParamPoint& theta) {
  model.validate_theta(theta);

  if (model.support() == Support::kDiscrete) {
    if (const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel)) {
      return fisher_output_exact(model, *dc, theta);
    }
  }
  if (const auto* g = as_gaussian(model)) {
    if (const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel)) {
      if (awgn->dim() != g->dim()) {
        throw std::invalid_argument("fisher_output: model/channel dimension mismatch");
      }
      // Y ~ N(theta, (sigma^2 + sigma_noise^2) I): location-family Fisher.
      const double var = g->sigma() * g->sigma() + awgn->sigma_noise() * awgn->sigma_noise();
      FisherMatrix f;
      f.theta = theta;
      f.entries = Matrix::Identity(g->dim(), g->dim()) / var;
      f.method = "closed_form_gaussian_awgn";
      return f;
    }
    if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
      if (g->dim() != 1) {
        throw std::invalid_argument("fisher_output: quantizer needs a scalar model");
      }
      const Vector m = push_forward_gaussian_quantizer(*g, *q, theta);
      const Vector dm = push_forward_gaussian_quantizer_dtheta(*g, *q, theta);
      double info = 0.0;
      for (int y = 0; y < m.size(); ++y) {
        if (m[y] >= kMassFloor) info += dm[y] * dm[y] / m[y];
      }
      FisherMatrix f;
      f.theta = theta;
      f.entries = Matrix::Constant(1, 1, info);
      f.method = "closed_form_gaussian_quantizer";
      return f;
    }
  }
  throw std::invalid_argument("fisher_output: unsupported model/channel pair (" +
                              channel.kind() + ")");
}

TraceDecomposition fisher_trace_decomposition(const StatModel& model, const Channel& channel,
                                              const ParamPoint& theta,
                                              DecompositionMethod method,
                                              std::int64_t n_samples, RngStream* rng) {
  model.validate_theta(theta);
  TraceDecomposition result;

  const auto* g = as_gaussian(model);
  const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel);

  // Discrete outputs: conditional score mean E[S | y] = dm(y) / m(y).
  Vector m;
  Matrix grad;
  bool discrete_path = false;
  if (model.support() == Support::kDiscrete) {
    if (const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel)) {
      m = push_forward_discrete(model, *dc, theta);
      std::string tag;
      grad = output_pmf_gradient(model, *dc, theta, m, 1e-5, &tag);
      discrete_path = true;
    }
  } else if (g != nullptr) {
    if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
      if (g->dim() != 1) {
        throw std::invalid_argument("fisher_trace_decomposition: quantizer needs a scalar model");
      }
      m = push_forward_gaussian_quantizer(*g, *q, theta);
      grad = push_forward_gaussian_quantizer_dtheta(*g, *q, theta).transpose();
      discrete_path = true;
    }
  }

  if (method == DecompositionMethod::kExact) {
    if (discrete_path) {
      result.per_output = Vector::Zero(m.size());
      double trace = 0.0;
      for (int y = 0; y < m.size(); ++y) {
        if (m[y] < kMassFloor) continue;
        const double contrib = grad.col(y).squaredNorm() / m[y];
        result.per_output[y] = contrib;
        trace += contrib;
      }
      result.trace = trace;
      return result;
    }
    if (g != nullptr && awgn != nullptr) {
      const double var = g->sigma() * g->sigma() + awgn->sigma_noise() * awgn->sigma_noise();
      result.trace = g->dim() / var;
      return result;
    }
    throw std::invalid_argument("fisher_trace_decomposition: no exact method for this pair");
  }

  // Monte Carlo: sample Y from the exact output law and average the squared
  // norm of the exact conditional score mean.
  if (rng == nullptr || n_samples < 2) {
    throw std::invalid_argument(
        "fisher_trace_decomposition: Monte Carlo needs an RNG stream and >= 2 samples");
  }

  const RngStream base = rng->fork();
  MeanAccumulator acc;
  if (discrete_path) {
    Vector weight(m.size());
    for (int y = 0; y < m.size(); ++y) {
      weight[y] = m[y] < kMassFloor ? 0.0 : grad.col(y).squaredNorm() / (m[y] * m[y]);
    }
    acc = chunked_reduce<MeanAccumulator>(
        n_samples, kMcChunk, default_thread_count(),
        [&](std::int64_t begin, std::int64_t end, MeanAccumulator& out) {
          RngStream stream = base.substream(static_cast<std::uint64_t>(begin / kMcChunk));
          for (std::int64_t s = begin; s < end; ++s) {
            out.add(weight[stream.discrete(m)]);
          }
        });
  } else if (g != nullptr && awgn != nullptr) {
    const double var = g->sigma() * g->sigma() + awgn->sigma_noise() * awgn->sigma_noise();
    const double sd = std::sqrt(var);
    const int d = g->dim();
    acc = chunked_reduce<MeanAccumulator>(
        n_samples, kMcChunk, default_thread_count(),
        [&](std::int64_t begin, std::int64_t end, MeanAccumulator& out) {
          RngStream stream = base.substream(static_cast<std::uint64_t>(begin / kMcChunk));
          for (std::int64_t s = begin; s < end; ++s) {
            // E[S | y] = (y - theta) / var for the Gaussian pair.
            double sq = 0.0;
            for (int j = 0; j < d; ++j) {
              const double dev = sd * stream.normal();
              sq += dev * dev;
            }
            out.add(sq / (var * var));
          }
        });
  } else {
    throw std::invalid_argument("fisher_trace_decomposition: unsupported model/channel pair");
  }

  result.trace = acc.mean();
  result.std_error = acc.std_error();
  result.n_samples = n_samples;
  return result;
}

FdCheckResult fisher_fd_check(const StatModel& model, const DiscreteChannel& channel,
                              const ParamPoint& theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fisher_fd_check: h must be positive");
  const FisherMatrix fisher = fisher_output_exact(model, channel, theta);
  const Vector base = push_forward_discrete(model, channel, theta);

  FdCheckResult result;
  result.step_warning = h < 1e-7;
  for (int j = 0; j < model.dim(); ++j) {
    ParamPoint shifted = theta;
    shifted[j] += h;
    const Vector moved = push_forward_discrete(model, channel, shifted);
    const double kl = kl_divergence(base, moved).value;
    const double estimate = 2.0 * kl / (h * h);
    const double denom = std::max(std::abs(fisher.entries(j, j)), 1e-12);
    result.max_rel_deviation =
        std::max(result.max_rel_deviation, std::abs(estimate - fisher.entries(j, j)) / denom);
  }
  return result;
}

}  // namespace infobound
