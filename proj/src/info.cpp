#include "infobound/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infobound {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr std::int64_t kMcChunk = 65536;

void validate_pmf(const Vector& p, const char* name) {
  if (p.size() < 1) throw std::invalid_argument(std::string(name) + ": empty pmf");
  for (int i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw std::invalid_argument(std::string(name) + ": entry " + std::to_string(i) +
                                  " must be finite and nonnegative");
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(name) + ": pmf sums to " + std::to_string(p.sum()) +
                                ", expected 1 within 1e-9");
  }
}

double clamp_nonneg(double v, const char* what) {
  if (v < 0.0) {
    if (v < -1e-12) {
      throw std::logic_error(std::string(what) + ": nonnegative quantity came out " +
                             std::to_string(v));
    }
    return 0.0;
  }
  return v;
}

const GaussianLocation* as_gaussian(const StatModel& model) {
  return dynamic_cast<const GaussianLocation*>(&model);
}

}  // namespace

const char* to_string(MiMethod method) {
  switch (method) {
    case MiMethod::kExactDiscrete: return "exact_discrete";
    case MiMethod::kClosedFormGaussian: return "closed_form_gaussian";
    case MiMethod::kMonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

double mutual_information_pmf(const Vector& input_pmf, const DiscreteChannel& channel) {
  validate_pmf(input_pmf, "mutual_information_pmf: input");
  if (input_pmf.size() != channel.input_size()) {
    throw std::invalid_argument("mutual_information_pmf: input pmf of size " +
                                std::to_string(input_pmf.size()) +
                                " does not match channel input of size " +
                                std::to_string(channel.input_size()));
  }
  const Matrix& w = channel.matrix();
  const Vector m = w.transpose() * input_pmf;
  double mi = 0.0;
  for (int x = 0; x < w.rows(); ++x) {
    if (input_pmf[x] == 0.0) continue;
    for (int y = 0; y < w.cols(); ++y) {
      if (w(x, y) == 0.0) continue;
      mi += input_pmf[x] * w(x, y) * (std::log(w(x, y)) - std::log(m[y]));
    }
  }
  return clamp_nonneg(mi, "mutual_information_pmf");
}

MIEstimate mi_exact_discrete(const StatModel& model, const DiscreteChannel& channel,
                             const ParamPoint& theta) {
  if (model.support() != Support::kDiscrete) {
    throw std::invalid_argument("mi_exact_discrete: model must have discrete support");
  }
  MIEstimate e;
  e.value = mutual_information_pmf(model.pmf(theta), channel);
  e.method = MiMethod::kExactDiscrete;
  return e;
}

MIEstimate mi_gaussian_awgn(double sigma, double sigma_noise, int n_nodes) {
  if (!(sigma > 0.0) || !(sigma_noise > 0.0)) {
    throw std::invalid_argument("mi_gaussian_awgn: sigma and sigma_noise must be positive");
  }
  if (n_nodes < 1) throw std::invalid_argument("mi_gaussian_awgn: n_nodes must be >= 1");
  MIEstimate e;
  const double snr = (sigma * sigma) / (sigma_noise * sigma_noise);
  e.value = 0.5 * n_nodes * std::log1p(snr);
  e.method = MiMethod::kClosedFormGaussian;
  return e;
}

MIEstimate mi_gaussian_quantizer(const GaussianLocation& model, const QuantizerChannel& channel,
                                 const ParamPoint& theta) {
  if (channel.dithered()) {
    throw std::invalid_argument(
        "mi_gaussian_quantizer: no closed form for the dithered quantizer; use mi_monte_carlo");
  }
  // Deterministic map: I(X; Y) = H(Y).
  const Vector p = push_forward_gaussian_quantizer(model, channel, theta);
  double h = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) h -= p[j] * std::log(p[j]);
  }
  MIEstimate e;
  e.value = clamp_nonneg(h, "mi_gaussian_quantizer");
  e.method = MiMethod::kClosedFormGaussian;
  return e;
}

LogDensityFn marginal_log_density(const StatModel& model, const Channel& channel,
                                  const ParamPoint& theta) {
  model.validate_theta(theta);

  if (const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel)) {
    const Vector m = push_forward_discrete(model, *dc, theta);
    return [m](const Vector& y) {
      const int i = static_cast<int>(y[0]);
      if (y.size() != 1 || i < 0 || i >= m.size()) {
        throw std::domain_error("marginal_log_density: output symbol out of range");
      }
      return m[i] > 0.0 ? std::log(m[i]) : -std::numeric_limits<double>::infinity();
    };
  }

  if (const auto* g = as_gaussian(model)) {
    if (const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel)) {
      if (awgn->dim() != g->dim()) {
        throw std::invalid_argument("marginal_log_density: model/channel dimension mismatch");
      }
      // Y = X + Z ~ N(theta, (sigma^2 + sigma_noise^2) I).
      const double var = g->sigma() * g->sigma() + awgn->sigma_noise() * awgn->sigma_noise();
      const int d = g->dim();
      const ParamPoint mu = theta;
      const double log_norm = -0.5 * d * std::log(2.0 * 3.14159265358979323846 * var);
      return [mu, var, log_norm](const Vector& y) {
        return log_norm - (y - mu).squaredNorm() / (2.0 * var);
      };
    }
    if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
      const Vector m = push_forward_gaussian_quantizer(*g, *q, theta);
      return [m](const Vector& y) {
        const int i = static_cast<int>(y[0]);
        if (y.size() != 1 || i < 0 || i >= m.size()) {
          throw std::domain_error("marginal_log_density: output symbol out of range");
        }
        return m[i] > 0.0 ? std::log(m[i]) : -std::numeric_limits<double>::infinity();
      };
    }
  }

  throw std::invalid_argument("marginal_log_density: unsupported model/channel pair (" +
                              channel.kind() + ")");
}

MIEstimate mi_monte_carlo(const StatModel& model, const Channel& channel,
                          const ParamPoint& theta, std::int64_t n_samples, RngStream& rng) {
  if (n_samples < 2) {
    throw std::invalid_argument("mi_monte_carlo: need at least 2 samples");
  }
  if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
    if (!q->dithered()) {
      throw std::invalid_argument(
          "mi_monte_carlo: the undithered quantizer kernel is deterministic; use the exact "
          "output-entropy path instead");
    }
  }
  const LogDensityFn log_marginal = marginal_log_density(model, channel, theta);

  const RngStream base = rng.fork();
  const auto acc = chunked_reduce<MeanAccumulator>(
      n_samples, kMcChunk, default_thread_count(),
      [&](std::int64_t begin, std::int64_t end, MeanAccumulator& out) {
        RngStream stream = base.substream(static_cast<std::uint64_t>(begin / kMcChunk));
        for (std::int64_t s = begin; s < end; ++s) {
          const Vector x = model.sample(theta, stream);
          const Vector y = channel.sample(x, stream);
          out.add(channel.kernel_log_density(x, y) - log_marginal(y));
        }
      });

  MIEstimate e;
  e.value = acc.mean();
  e.std_error = acc.std_error();
  e.n_samples = n_samples;
  e.method = MiMethod::kMonteCarlo;
  if (e.value < -3.0 * e.std_error) {
    throw std::logic_error("mi_monte_carlo: estimate " + std::to_string(e.value) +
                           " is more than 3 standard errors below zero");
  }
  return e;
}

bool has_exact_mi(const StatModel& model, const Channel& channel) {
  if (model.support() == Support::kDiscrete &&
      dynamic_cast<const DiscreteChannel*>(&channel) != nullptr) {
    return true;
  }
  if (const auto* g = as_gaussian(model)) {
    if (dynamic_cast<const AwgnChannel*>(&channel) != nullptr) return true;
    if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
      return g->dim() == 1 && !q->dithered();
    }
  }
  return false;
}

MIEstimate mutual_information(const StatModel& model, const Channel& channel,
                              const ParamPoint& theta) {
  model.validate_theta(theta);
  if (model.support() == Support::kDiscrete) {
    if (const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel)) {
      return mi_exact_discrete(model, *dc, theta);
    }
  }
  if (const auto* g = as_gaussian(model)) {
    if (const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel)) {
      if (awgn->dim() != g->dim()) {
        throw std::invalid_argument("mutual_information: model/channel dimension mismatch");
      }
      return mi_gaussian_awgn(g->sigma(), awgn->sigma_noise(), g->dim());
    }
    if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
      return mi_gaussian_quantizer(*g, *q, theta);
    }
  }
  throw std::invalid_argument(
      "mutual_information: no exact method for this model/channel pair; use mi_monte_carlo");
}

CapacityResult capacity_blahut_arimoto(const DiscreteChannel& channel, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("capacity_blahut_arimoto: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("capacity_blahut_arimoto: max_iter must be >= 1");

  const Matrix& w = channel.matrix();
  const int nx = channel.input_size();
  const int ny = channel.output_size();

  // Cache ln W over the support once.
  Matrix log_w = Matrix::Zero(nx, ny);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      log_w(x, y) = w(x, y) > 0.0 ? std::log(w(x, y)) : 0.0;
    }
  }

  Vector q = Vector::Constant(nx, 1.0 / nx);
  Vector d(nx);
  CapacityResult result;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector m = w.transpose() * q;
    for (int x = 0; x < nx; ++x) {
      double dx = 0.0;
      for (int y = 0; y < ny; ++y) {
        if (w(x, y) > 0.0) dx += w(x, y) * (log_w(x, y) - std::log(m[y]));
      }
      d[x] = dx;
    }
    const double lower = q.dot(d);
    const double upper = d.maxCoeff();
    result.capacity_nats = clamp_nonneg(lower, "capacity_blahut_arimoto");
    result.input_pmf = q;
    result.iterations = it;
    result.gap = upper - lower;
    if (result.gap <= tol) return result;

    Vector next = (q.array() * (d.array() - upper).exp()).matrix();
    q = next / next.sum();
  }
  throw std::runtime_error("capacity_blahut_arimoto: tolerance " + std::to_string(tol) +
                           " not reached after " + std::to_string(max_iter) +
                           " iterations; residual gap " + std::to_string(result.gap));
}

DivergenceValue kl_divergence(const Vector& p, const Vector& q) {
  validate_pmf(p, "kl_divergence: p");
  validate_pmf(q, "kl_divergence: q");
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: pmfs have different lengths");
  }
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw std::domain_error("kl_divergence: q has zero mass at index " + std::to_string(i) +
                              " where p does not; the divergence is infinite");
    }
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  DivergenceValue v;
  v.value = clamp_nonneg(kl, "kl_divergence");
  v.kind = DivergenceKind::kKL;
  v.method = "exact";
  return v;
}

DivergenceValue js_divergence(const Vector& p, const Vector& q) {
  validate_pmf(p, "js_divergence: p");
  validate_pmf(q, "js_divergence: q");
  if (p.size() != q.size()) {
    throw std::invalid_argument("js_divergence: pmfs have different lengths");
  }
  const Vector m = 0.5 * (p + q);
  // The mixture dominates both arguments, so both KL terms are finite; the
  // value lies in [0, 2 ln 2].
  double js = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) js += p[i] * (std::log(p[i]) - std::log(m[i]));
    if (q[i] > 0.0) js += q[i] * (std::log(q[i]) - std::log(m[i]));
  }
  DivergenceValue v;
  v.value = clamp_nonneg(js, "js_divergence");
  v.kind = DivergenceKind::kJS;
  v.method = "exact";
  return v;
}

namespace {

MeanAccumulator mc_log_ratio_mean(const LogDensityFn& log_num, const LogDensityFn& log_den,
                                  const SamplerFn& sampler, std::int64_t n_samples,
                                  const RngStream& base) {
  return chunked_reduce<MeanAccumulator>(
      n_samples, kMcChunk, default_thread_count(),
      [&](std::int64_t begin, std::int64_t end, MeanAccumulator& out) {
        RngStream stream = base.substream(static_cast<std::uint64_t>(begin / kMcChunk));
        for (std::int64_t s = begin; s < end; ++s) {
          const Vector x = sampler(stream);
          const double v = log_num(x) - log_den(x);
          if (!std::isfinite(v)) {
            throw std::domain_error(
                "divergence Monte Carlo: sampled a point with a non-finite log ratio "
                "(missing absolute continuity?)");
          }
          out.add(v);
        }
      });
}

}  // namespace

DivergenceValue kl_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                 const SamplerFn& sample_p, std::int64_t n_samples,
                                 RngStream& rng) {
  if (n_samples < 2) throw std::invalid_argument("kl_divergence_mc: need at least 2 samples");
  const RngStream base = rng.fork();
  const MeanAccumulator acc = mc_log_ratio_mean(log_p, log_q, sample_p, n_samples, base);
  DivergenceValue v;
  v.value = acc.mean();
  v.std_error = acc.std_error();
  v.kind = DivergenceKind::kKL;
  v.method = "mc";
  return v;
}

DivergenceValue js_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                 const SamplerFn& sample_p, const SamplerFn& sample_q,
                                 std::int64_t n_samples, RngStream& rng) {
  if (n_samples < 2) throw std::invalid_argument("js_divergence_mc: need at least 2 samples");
  auto log_mix = [&log_p, &log_q](const Vector& x) {
    const double a = log_p(x);
    const double b = log_q(x);
    const double hi = std::max(a, b);
    if (!std::isfinite(hi)) return hi;
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi)) - kLn2;
  };
  const RngStream base_p = rng.fork();
  const RngStream base_q = rng.fork();
  const MeanAccumulator from_p = mc_log_ratio_mean(log_p, log_mix, sample_p, n_samples, base_p);
  const MeanAccumulator from_q = mc_log_ratio_mean(log_q, log_mix, sample_q, n_samples, base_q);
  DivergenceValue v;
  v.value = from_p.mean() + from_q.mean();
  v.std_error = std::sqrt(from_p.std_error() * from_p.std_error() +
                          from_q.std_error() * from_q.std_error());
  v.kind = DivergenceKind::kJS;
  v.method = "mc";
  return v;
}

double mi_prior_from_js(double js_nats) {
  if (!(js_nats >= 0.0) || js_nats > 2.0 * kLn2 + 1e-9) {
    throw std::invalid_argument("mi_prior_from_js: JS divergence must lie in [0, 2 ln 2]");
  }
  return 0.5 * js_nats;
}

}  // namespace infobound
