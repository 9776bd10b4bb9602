#pragma once

#include <string>

#include "infobound/common.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"

namespace infobound {

enum class SpaceKind { kDiscrete, kContinuous };

// Input/output space of a channel: alphabet size when discrete, vector
// dimension when continuous.
struct SpaceDesc {
  SpaceKind kind;
  int extent;
};

// Markov kernel W(y | x).  Discrete points are length-1 vectors holding the
// symbol index, continuous points live in R^d, matching StatModel samples.
class Channel {
 public:
  virtual ~Channel() = default;

  virtual SpaceDesc input_space() const = 0;
  virtual SpaceDesc output_space() const = 0;
  // Stable identifier: "matrix", "bsc", "bec", "rr", "awgn", "quantizer", ...
  virtual std::string kind() const = 0;

  // ln W(y | x); log-pmf value in the discrete case.  Throws
  // std::logic_error for kernels without a density (deterministic maps).
  virtual double kernel_log_density(const Vector& x, const Vector& y) const = 0;
  virtual Vector sample(const Vector& x, RngStream& rng) const = 0;
};

// Channel given by a row-stochastic transition matrix (|X| rows, |Y| columns).
// Rows must sum to 1 within 1e-12 and entries must be nonnegative.
class DiscreteChannel : public Channel {
 public:
  explicit DiscreteChannel(Matrix transition);

  const Matrix& matrix() const { return transition_; }
  int input_size() const { return static_cast<int>(transition_.rows()); }
  int output_size() const { return static_cast<int>(transition_.cols()); }

  SpaceDesc input_space() const override {
    return {SpaceKind::kDiscrete, input_size()};
  }
  SpaceDesc output_space() const override {
    return {SpaceKind::kDiscrete, output_size()};
  }
  std::string kind() const override { return "matrix"; }
  double kernel_log_density(const Vector& x, const Vector& y) const override;
  Vector sample(const Vector& x, RngStream& rng) const override;

 private:
  Matrix transition_;
};

// Binary randomized response with privacy parameter epsilon > 0: the input
// bit is kept with probability e^eps / (1 + e^eps), flipped otherwise, so
// every likelihood ratio is bounded by e^eps.
class RandomizedResponseChannel final : public DiscreteChannel {
 public:
  explicit RandomizedResponseChannel(double epsilon);

  double epsilon() const { return epsilon_; }
  double keep_probability() const { return matrix()(0, 0); }
  std::string kind() const override { return "rr"; }

 private:
  double epsilon_;
};

// Additive white Gaussian noise on R^d: Y = X + Z, Z ~ N(0, sigma_noise^2 I).
class AwgnChannel final : public Channel {
 public:
  explicit AwgnChannel(double sigma_noise, int dim = 1);

  double sigma_noise() const { return sigma_noise_; }
  int dim() const { return dim_; }

  SpaceDesc input_space() const override { return {SpaceKind::kContinuous, dim_}; }
  SpaceDesc output_space() const override { return {SpaceKind::kContinuous, dim_}; }
  std::string kind() const override { return "awgn"; }
  double kernel_log_density(const Vector& x, const Vector& y) const override;
  Vector sample(const Vector& x, RngStream& rng) const override;

 private:
  double sigma_noise_;
  int dim_;
};

// k-bit scalar quantizer: 2^k equal-width bins on [lo, hi], with the outer
// bins absorbing the tails.  Values on a bin edge go to the right bin.  With
// dither enabled the input is shifted by U ~ Uniform[-w/2, w/2) before
// binning (w = bin width) and the kernel has a proper conditional pmf; the
// undithered quantizer is deterministic and has no kernel density.
class QuantizerChannel final : public Channel {
 public:
  QuantizerChannel(int bits, double lo, double hi, bool dither = false);

  int bits() const { return bits_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool dithered() const { return dither_; }
  int n_bins() const { return n_bins_; }
  double bin_width() const { return width_; }
  // Interior edges are lo + j*w; the outer edges are -inf / +inf.
  double lower_edge(int bin) const;
  double upper_edge(int bin) const;
  // Deterministic bin index of a scalar input.
  int bin_of(double x) const;
  // Conditional output pmf given input x (point mass when undithered).
  Vector output_pmf_given(double x) const;

  SpaceDesc input_space() const override { return {SpaceKind::kContinuous, 1}; }
  SpaceDesc output_space() const override { return {SpaceKind::kDiscrete, n_bins_}; }
  std::string kind() const override { return "quantizer"; }
  double kernel_log_density(const Vector& x, const Vector& y) const override;
  Vector sample(const Vector& x, RngStream& rng) const override;

 private:
  int bits_;
  double lo_, hi_;
  bool dither_;
  int n_bins_;
  double width_;
};

// Binary symmetric channel with crossover probability p in [0, 1].
DiscreteChannel bsc(double p);
// Binary erasure channel: inputs {0,1}, outputs {0, erasure, 1}.
DiscreteChannel binary_erasure_channel(double erasure_prob);
DiscreteChannel identity_channel(int alphabet_size);
// Kernel acting independently on `copies` symbols; joint indices are encoded
// little-endian like TensorProductModel.
DiscreteChannel tensor_power(const DiscreteChannel& channel, int copies);

// Output pmf of a discrete model pushed through a discrete channel:
// row vector pmf(theta)^T W.  Throws on alphabet mismatch.
Vector push_forward_discrete(const StatModel& model, const DiscreteChannel& channel,
                             const ParamPoint& theta);

// Output pmf of a scalar Gaussian location model pushed through a quantizer,
// and its derivative in theta.  Closed form via the Gaussian CDF; covers both
// the deterministic and the dithered quantizer.
Vector push_forward_gaussian_quantizer(const GaussianLocation& model,
                                       const QuantizerChannel& channel,
                                       const ParamPoint& theta);
Vector push_forward_gaussian_quantizer_dtheta(const GaussianLocation& model,
                                              const QuantizerChannel& channel,
                                              const ParamPoint& theta);

// Standard normal CDF evaluated via erfc (accurate in both tails).
double normal_cdf(double z);
double normal_pdf(double z);

}  // namespace infobound
