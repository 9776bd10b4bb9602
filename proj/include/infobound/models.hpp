#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "infobound/common.hpp"
#include "infobound/rng.hpp"

namespace infobound {

enum class Support { kDiscrete, kContinuous };

// Parametric statistical model p_theta(x) with an explicit score function
// S_theta(x) = grad_theta ln p_theta(x) and a declared sub-Gaussian parameter
// N for the score: E[exp(lambda <u, S>)] <= exp(lambda^2 N^2 / 2) for every
// unit vector u.
//
// Samples are always Vectors: continuous models return a point in R^k,
// discrete models return a length-1 vector holding the symbol index.
class StatModel {
 public:
  virtual ~StatModel() = default;

  // Parameter dimension d.
  virtual int dim() const = 0;
  virtual Support support() const = 0;
  // Length of a sample vector (1 for discrete models).
  virtual int sample_dim() const = 0;
  // Number of symbols; throws std::logic_error for continuous models.
  virtual int alphabet_size() const;

  // Throws std::invalid_argument if theta is outside the admissible set.
  virtual void validate_theta(const ParamPoint& theta) const = 0;
  // Declared sub-Gaussian parameter of the score at theta.
  virtual double subgaussian_param(const ParamPoint& theta) const = 0;

  virtual double log_density(const ParamPoint& theta, const Vector& x) const = 0;
  virtual Vector score(const ParamPoint& theta, const Vector& x) const = 0;
  virtual Vector sample(const ParamPoint& theta, RngStream& rng) const = 0;

  // Discrete-support fast paths; the defaults throw std::logic_error.
  virtual Vector pmf(const ParamPoint& theta) const;
  // d x alphabet matrix whose column x is score(theta, x).
  virtual Matrix score_table(const ParamPoint& theta) const;
};

// N(theta, sigma^2 I_d) with theta restricted to the box [-1, 1]^d.
// Score (x - theta) / sigma^2; sub-Gaussian parameter 1 / sigma.
class GaussianLocation final : public StatModel {
 public:
  explicit GaussianLocation(double sigma, int dim = 1);

  double sigma() const { return sigma_; }
  static constexpr double kBoxHalfWidth = 1.0;

  int dim() const override { return dim_; }
  Support support() const override { return Support::kContinuous; }
  int sample_dim() const override { return dim_; }
  void validate_theta(const ParamPoint& theta) const override;
  double subgaussian_param(const ParamPoint& theta) const override;
  double log_density(const ParamPoint& theta, const Vector& x) const override;
  Vector score(const ParamPoint& theta, const Vector& x) const override;
  Vector sample(const ParamPoint& theta, RngStream& rng) const override;

 private:
  double sigma_;
  int dim_;
};

// Bernoulli(theta) on {0, 1}; theta must stay at least 1e-9 away from the
// ends of (0, 1).  Score is -1/(1-theta) at x=0 and 1/theta at x=1; the
// declared sub-Gaussian parameter is the score sup-norm max(1/theta, 1/(1-theta)).
class BernoulliModel final : public StatModel {
 public:
  BernoulliModel() = default;

  static constexpr double kBoundaryMargin = 1e-9;

  int dim() const override { return 1; }
  Support support() const override { return Support::kDiscrete; }
  int sample_dim() const override { return 1; }
  int alphabet_size() const override { return 2; }
  void validate_theta(const ParamPoint& theta) const override;
  double subgaussian_param(const ParamPoint& theta) const override;
  double log_density(const ParamPoint& theta, const Vector& x) const override;
  Vector score(const ParamPoint& theta, const Vector& x) const override;
  Vector sample(const ParamPoint& theta, RngStream& rng) const override;
  Vector pmf(const ParamPoint& theta) const override;
  Matrix score_table(const ParamPoint& theta) const override;
};

// Normalizing constant C(theta) = sum_x f1(x)^theta f0(x)^(1-theta) of the
// exponential interpolation between two positive pmfs, and its derivative.
struct TwistNormalizer {
  double value;
  double derivative;
};
TwistNormalizer twist_normalizer(const Vector& f0, const Vector& f1, double theta);

// One-parameter exponential family interpolating two finite pmfs:
//   f_theta(x) = f1(x)^theta f0(x)^(1-theta) / C(theta),  theta in [0, 1].
// Both endpoint pmfs must be strictly positive so the likelihood ratio is
// finite; with c = max ratio bound, the score ln(f1/f0) - C'/C is bounded by
// 2 ln c, which is the declared sub-Gaussian parameter.
class TwistFamily final : public StatModel {
 public:
  TwistFamily(Vector f0, Vector f1);

  const Vector& f0() const { return f0_; }
  const Vector& f1() const { return f1_; }
  // c >= 1 with 1/c <= f1(x)/f0(x) <= c for all x.
  double ratio_bound() const { return ratio_bound_; }

  int dim() const override { return 1; }
  Support support() const override { return Support::kDiscrete; }
  int sample_dim() const override { return 1; }
  int alphabet_size() const override { return static_cast<int>(f0_.size()); }
  void validate_theta(const ParamPoint& theta) const override;
  double subgaussian_param(const ParamPoint& theta) const override;
  double log_density(const ParamPoint& theta, const Vector& x) const override;
  Vector score(const ParamPoint& theta, const Vector& x) const override;
  Vector sample(const ParamPoint& theta, RngStream& rng) const override;
  Vector pmf(const ParamPoint& theta) const override;
  Matrix score_table(const ParamPoint& theta) const override;

 private:
  Vector f0_, f1_;
  Vector log_ratio_;
  double ratio_bound_;
};

// B independent copies of a discrete base model, each with its own parameter
// block.  Samples are joint symbol indices x = sum_b x_b * m^b with m the
// base alphabet size; the pmf is the Kronecker product of the block pmfs and
// scores stack blockwise.
class TensorProductModel final : public StatModel {
 public:
  TensorProductModel(std::shared_ptr<const StatModel> base, int copies);

  const StatModel& base() const { return *base_; }
  int copies() const { return copies_; }

  int dim() const override { return base_->dim() * copies_; }
  Support support() const override { return Support::kDiscrete; }
  int sample_dim() const override { return 1; }
  int alphabet_size() const override;
  void validate_theta(const ParamPoint& theta) const override;
  double subgaussian_param(const ParamPoint& theta) const override;
  double log_density(const ParamPoint& theta, const Vector& x) const override;
  Vector score(const ParamPoint& theta, const Vector& x) const override;
  Vector sample(const ParamPoint& theta, RngStream& rng) const override;
  Vector pmf(const ParamPoint& theta) const override;
  Matrix score_table(const ParamPoint& theta) const override;

 private:
  ParamPoint block_theta(const ParamPoint& theta, int b) const;
  std::vector<int> decode(double joint_index) const;

  std::shared_ptr<const StatModel> base_;
  int copies_;
};

// Empirical check of the declared sub-Gaussian parameter: evaluates the
// moment generating function of <u, S_theta(X)> over a lambda grid and a set
// of directions, and compares ln MGF against lambda^2 N^2 / 2.  Discrete
// models are summed exactly; continuous models are estimated by Monte Carlo
// with a 4-standard-error allowance.
struct SubgaussianCertificate {
  double declared_n = 0.0;
  // Largest value of ln MGF - lambda^2 N^2 / 2 seen across the grid.
  double max_gap = 0.0;
  double worst_lambda = 0.0;
  bool certified = false;
  // Set if the empirical MGF overflowed at some lambda.
  std::optional<double> diverged_lambda;
};
SubgaussianCertificate certify_subgaussian(const StatModel& model, const ParamPoint& theta,
                                           const std::vector<double>& lambda_grid,
                                           int direction_count, std::int64_t mc_samples,
                                           RngStream& rng);

}  // namespace infobound
