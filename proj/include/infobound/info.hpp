#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "infobound/channels.hpp"
#include "infobound/common.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"

namespace infobound {

enum class MiMethod { kExactDiscrete, kClosedFormGaussian, kMonteCarlo };
const char* to_string(MiMethod method);

// Mutual information (or divergence-derived information quantity) in nats.
// std_error is 0 for exact methods.
struct MIEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  MiMethod method = MiMethod::kExactDiscrete;
};

// I(X; Y) for an input pmf pushed through a discrete channel, exact in nats.
double mutual_information_pmf(const Vector& input_pmf, const DiscreteChannel& channel);

// I(X; Y) with X ~ model at theta and Y the channel output.
MIEstimate mi_exact_discrete(const StatModel& model, const DiscreteChannel& channel,
                             const ParamPoint& theta);

// n_nodes independent scalar Gaussians through AWGN:
// I = (n/2) ln(1 + sigma^2 / sigma_noise^2).
MIEstimate mi_gaussian_awgn(double sigma, double sigma_noise, int n_nodes = 1);

// Scalar Gaussian through a quantizer.  The undithered quantizer is a
// deterministic map, so I(X;Y) = H(Y) in closed form; the dithered variant
// has no closed form here and must go through mi_monte_carlo.
MIEstimate mi_gaussian_quantizer(const GaussianLocation& model,
                                 const QuantizerChannel& channel, const ParamPoint& theta);

// Monte Carlo estimate of I(X;Y) as the mean log likelihood ratio
// ln W(y|x) - ln m(y) over samples (x, y), using the exact output marginal m.
// Supported pairs: any model+DiscreteChannel, Gaussian+AWGN, and
// Gaussian+dithered quantizer.  Deterministic kernels are rejected.
// Chunked over samples; the result does not depend on the thread count.
MIEstimate mi_monte_carlo(const StatModel& model, const Channel& channel,
                          const ParamPoint& theta, std::int64_t n_samples, RngStream& rng);

// True if mutual_information() can compute this pair without Monte Carlo.
bool has_exact_mi(const StatModel& model, const Channel& channel);

// Exact-path dispatcher over the supported model/channel pairs; throws
// std::invalid_argument when only Monte Carlo is available.
MIEstimate mutual_information(const StatModel& model, const Channel& channel,
                              const ParamPoint& theta);

// Channel capacity by Blahut-Arimoto in nats, with the standard upper/lower
// capacity gap max_x D_x - sum_x q_x D_x as the stopping criterion.
struct CapacityResult {
  double capacity_nats = 0.0;
  Vector input_pmf;
  int iterations = 0;
  double gap = 0.0;
};
CapacityResult capacity_blahut_arimoto(const DiscreteChannel& channel, double tol = 1e-10,
                                       int max_iter = 20000);

enum class DivergenceKind { kKL, kJS };

struct DivergenceValue {
  double value = 0.0;
  DivergenceKind kind = DivergenceKind::kKL;
  std::string method;  // "exact" or "mc"
  double std_error = 0.0;
};

// KL(p || q) over matching finite alphabets, exact.  Throws
// std::domain_error when q fails to dominate p.
DivergenceValue kl_divergence(const Vector& p, const Vector& q);

// Jensen-Shannon divergence JS(p, q) = KL(p||m) + KL(q||m), m = (p+q)/2.
// Note: no 1/2 prefactor, so the range is [0, 2 ln 2].
DivergenceValue js_divergence(const Vector& p, const Vector& q);

using LogDensityFn = std::function<double(const Vector&)>;
using SamplerFn = std::function<Vector(RngStream&)>;

// Monte Carlo KL(p || q) as the mean of log p - log q under samples from p.
DivergenceValue kl_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                 const SamplerFn& sample_p, std::int64_t n_samples,
                                 RngStream& rng);

// Monte Carlo JS(p, q): KL(p||m) estimated from p-samples plus KL(q||m) from
// q-samples, with the mixture density m evaluated exactly from the two logs.
DivergenceValue js_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                 const SamplerFn& sample_p, const SamplerFn& sample_q,
                                 std::int64_t n_samples, RngStream& rng);

// Mutual information I(V; Y) for a uniform binary latent V with conditionals
// p and q: equals JS(p, q) / 2 under the convention above.
double mi_prior_from_js(double js_nats);

// Exact log marginal density/pmf of the channel output for the pairs
// supported by mi_monte_carlo.  Useful for transcript-level divergences.
LogDensityFn marginal_log_density(const StatModel& model, const Channel& channel,
                                  const ParamPoint& theta);

}  // namespace infobound
