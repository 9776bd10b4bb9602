#include "infobound/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infobound {

namespace {

constexpr double kPi = 3.14159265358979323846;

int symbol_index(const Vector& x, int alphabet, const char* what) {
  if (x.size() != 1) {
    throw std::domain_error(std::string(what) + ": discrete sample must be a length-1 index vector");
  }
  const double v = x[0];
  if (!(v == std::floor(v))) {
    throw std::domain_error(std::string(what) + ": sample index must be integral");
  }
  const int i = static_cast<int>(v);
  if (i < 0 || i >= alphabet) {
    throw std::domain_error(std::string(what) + ": sample index " + std::to_string(i) +
                            " outside alphabet of size " + std::to_string(alphabet));
  }
  return i;
}

void check_dim(const ParamPoint& theta, int dim, const char* what) {
  if (theta.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": theta has length " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(dim));
  }
}

}  // namespace

int StatModel::alphabet_size() const {
  throw std::logic_error("alphabet_size: model has continuous support");
}

Vector StatModel::pmf(const ParamPoint&) const {
  throw std::logic_error("pmf: model has continuous support");
}

Matrix StatModel::score_table(const ParamPoint&) const {
  throw std::logic_error("score_table: model has continuous support");
}

// ---------------------------------------------------------------------------
// GaussianLocation

GaussianLocation::GaussianLocation(double sigma, int dim) : sigma_(sigma), dim_(dim) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GaussianLocation: sigma must be positive and finite");
  }
  if (dim < 1) {
    throw std::invalid_argument("GaussianLocation: dim must be >= 1");
  }
}

void GaussianLocation::validate_theta(const ParamPoint& theta) const {
  check_dim(theta, dim_, "GaussianLocation");
  for (int j = 0; j < dim_; ++j) {
    if (!(std::abs(theta[j]) <= kBoxHalfWidth)) {
      throw std::invalid_argument("GaussianLocation: theta[" + std::to_string(j) +
                                  "] = " + std::to_string(theta[j]) +
                                  " outside the box [-1, 1]^d");
    }
  }
}

double GaussianLocation::subgaussian_param(const ParamPoint& theta) const {
  validate_theta(theta);
  return 1.0 / sigma_;
}

double GaussianLocation::log_density(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  if (x.size() != dim_) {
    throw std::domain_error("GaussianLocation: sample has wrong dimension");
  }
  const double q = (x - theta).squaredNorm() / (2.0 * sigma_ * sigma_);
  return -0.5 * dim_ * std::log(2.0 * kPi * sigma_ * sigma_) - q;
}

Vector GaussianLocation::score(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  if (x.size() != dim_) {
    throw std::domain_error("GaussianLocation: sample has wrong dimension");
  }
  return (x - theta) / (sigma_ * sigma_);
}

Vector GaussianLocation::sample(const ParamPoint& theta, RngStream& rng) const {
  validate_theta(theta);
  Vector x(dim_);
  for (int j = 0; j < dim_; ++j) x[j] = theta[j] + sigma_ * rng.normal();
  return x;
}

// ---------------------------------------------------------------------------
// BernoulliModel

void BernoulliModel::validate_theta(const ParamPoint& theta) const {
  check_dim(theta, 1, "BernoulliModel");
  const double p = theta[0];
  if (!(p >= kBoundaryMargin) || !(p <= 1.0 - kBoundaryMargin)) {
    throw std::invalid_argument(
        "BernoulliModel: theta = " + std::to_string(p) +
        " must lie in [1e-9, 1 - 1e-9]; the score blows up at the ends of (0, 1)");
  }
}

double BernoulliModel::subgaussian_param(const ParamPoint& theta) const {
  validate_theta(theta);
  const double p = theta[0];
  // The score is bounded by max(1/p, 1/(1-p)); a bounded zero-mean variable
  // is sub-Gaussian with its sup-norm as parameter.
  return std::max(1.0 / p, 1.0 / (1.0 - p));
}

double BernoulliModel::log_density(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, 2, "BernoulliModel");
  return i == 1 ? std::log(theta[0]) : std::log(1.0 - theta[0]);
}

Vector BernoulliModel::score(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, 2, "BernoulliModel");
  Vector s(1);
  s[0] = i == 1 ? 1.0 / theta[0] : -1.0 / (1.0 - theta[0]);
  return s;
}

Vector BernoulliModel::sample(const ParamPoint& theta, RngStream& rng) const {
  validate_theta(theta);
  Vector x(1);
  x[0] = rng.uniform() < theta[0] ? 1.0 : 0.0;
  return x;
}

Vector BernoulliModel::pmf(const ParamPoint& theta) const {
  validate_theta(theta);
  Vector p(2);
  p[0] = 1.0 - theta[0];
  p[1] = theta[0];
  return p;
}

Matrix BernoulliModel::score_table(const ParamPoint& theta) const {
  validate_theta(theta);
  Matrix s(1, 2);
  s(0, 0) = -1.0 / (1.0 - theta[0]);
  s(0, 1) = 1.0 / theta[0];
  return s;
}

// ---------------------------------------------------------------------------
// TwistFamily

namespace {

void validate_twist_endpoints(const Vector& f0, const Vector& f1) {
  if (f0.size() != f1.size()) {
    throw std::invalid_argument("twist: f0 and f1 must have the same length");
  }
  if (f0.size() < 2) {
    throw std::invalid_argument("twist: endpoint pmfs need at least 2 symbols");
  }
  for (int i = 0; i < f0.size(); ++i) {
    if (!(f0[i] > 0.0) || !(f1[i] > 0.0)) {
      throw std::invalid_argument(
          "twist: endpoint pmfs must be strictly positive at every symbol "
          "(zero mass makes the likelihood ratio unbounded), offending index " +
          std::to_string(i));
    }
  }
  if (std::abs(f0.sum() - 1.0) > 1e-9 || std::abs(f1.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("twist: endpoint pmfs must sum to 1 (tolerance 1e-9)");
  }
}

}  // namespace

TwistNormalizer twist_normalizer(const Vector& f0, const Vector& f1, double theta) {
  validate_twist_endpoints(f0, f1);
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("twist_normalizer: theta must lie in [0, 1]");
  }
  double c = 0.0, dc = 0.0;
  for (int i = 0; i < f0.size(); ++i) {
    const double lr = std::log(f1[i]) - std::log(f0[i]);
    const double w = f0[i] * std::exp(theta * lr);
    c += w;
    dc += w * lr;
  }
  return {c, dc};
}

TwistFamily::TwistFamily(Vector f0, Vector f1) : f0_(std::move(f0)), f1_(std::move(f1)) {
  validate_twist_endpoints(f0_, f1_);
  f0_ /= f0_.sum();
  f1_ /= f1_.sum();
  log_ratio_ = (f1_.array().log() - f0_.array().log()).matrix();
  double c = 1.0;
  for (int i = 0; i < f0_.size(); ++i) {
    c = std::max(c, std::max(f1_[i] / f0_[i], f0_[i] / f1_[i]));
  }
  ratio_bound_ = c;
}

void TwistFamily::validate_theta(const ParamPoint& theta) const {
  check_dim(theta, 1, "TwistFamily");
  if (!(theta[0] >= 0.0 && theta[0] <= 1.0)) {
    throw std::invalid_argument("TwistFamily: theta = " + std::to_string(theta[0]) +
                                " must lie in [0, 1]");
  }
}

double TwistFamily::subgaussian_param(const ParamPoint& theta) const {
  validate_theta(theta);
  // |score| = |ln(f1/f0) - C'/C| <= 2 ln c since both terms are in
  // [-ln c, ln c]; bounded zero-mean implies sub-Gaussian with the sup-norm.
  return 2.0 * std::log(ratio_bound_);
}

double TwistFamily::log_density(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, alphabet_size(), "TwistFamily");
  const TwistNormalizer c = twist_normalizer(f0_, f1_, theta[0]);
  return std::log(f0_[i]) + theta[0] * log_ratio_[i] - std::log(c.value);
}

Vector TwistFamily::score(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, alphabet_size(), "TwistFamily");
  const TwistNormalizer c = twist_normalizer(f0_, f1_, theta[0]);
  Vector s(1);
  s[0] = log_ratio_[i] - c.derivative / c.value;
  return s;
}

Vector TwistFamily::sample(const ParamPoint& theta, RngStream& rng) const {
  const Vector p = pmf(theta);
  Vector x(1);
  x[0] = static_cast<double>(rng.discrete(p));
  return x;
}

Vector TwistFamily::pmf(const ParamPoint& theta) const {
  validate_theta(theta);
  const TwistNormalizer c = twist_normalizer(f0_, f1_, theta[0]);
  Vector p(f0_.size());
  for (int i = 0; i < f0_.size(); ++i) {
    p[i] = f0_[i] * std::exp(theta[0] * log_ratio_[i]) / c.value;
  }
  return p;
}

Matrix TwistFamily::score_table(const ParamPoint& theta) const {
  validate_theta(theta);
  const TwistNormalizer c = twist_normalizer(f0_, f1_, theta[0]);
  Matrix s(1, f0_.size());
  for (int i = 0; i < f0_.size(); ++i) {
    s(0, i) = log_ratio_[i] - c.derivative / c.value;
  }
  return s;
}

// ---------------------------------------------------------------------------
// TensorProductModel

TensorProductModel::TensorProductModel(std::shared_ptr<const StatModel> base, int copies)
    : base_(std::move(base)), copies_(copies) {
  if (!base_) {
    throw std::invalid_argument("TensorProductModel: base model is null");
  }
  if (base_->support() != Support::kDiscrete) {
    throw std::invalid_argument("TensorProductModel: base model must have discrete support");
  }
  if (copies_ < 1) {
    throw std::invalid_argument("TensorProductModel: copies must be >= 1");
  }
  double total = 1.0;
  for (int b = 0; b < copies_; ++b) total *= base_->alphabet_size();
  if (total > 1e7) {
    throw std::invalid_argument("TensorProductModel: joint alphabet too large");
  }
}

int TensorProductModel::alphabet_size() const {
  int n = 1;
  for (int b = 0; b < copies_; ++b) n *= base_->alphabet_size();
  return n;
}

ParamPoint TensorProductModel::block_theta(const ParamPoint& theta, int b) const {
  return theta.segment(b * base_->dim(), base_->dim());
}

std::vector<int> TensorProductModel::decode(double joint_index) const {
  const int m = base_->alphabet_size();
  int idx = static_cast<int>(joint_index);
  std::vector<int> parts(static_cast<std::size_t>(copies_));
  for (int b = 0; b < copies_; ++b) {
    parts[static_cast<std::size_t>(b)] = idx % m;
    idx /= m;
  }
  return parts;
}

void TensorProductModel::validate_theta(const ParamPoint& theta) const {
  check_dim(theta, dim(), "TensorProductModel");
  for (int b = 0; b < copies_; ++b) base_->validate_theta(block_theta(theta, b));
}

double TensorProductModel::subgaussian_param(const ParamPoint& theta) const {
  validate_theta(theta);
  // The joint score stacks independent block scores; along any direction the
  // log MGF is a convex combination dominated by the worst block.
  double n = 0.0;
  for (int b = 0; b < copies_; ++b) {
    n = std::max(n, base_->subgaussian_param(block_theta(theta, b)));
  }
  return n;
}

double TensorProductModel::log_density(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, alphabet_size(), "TensorProductModel");
  const std::vector<int> parts = decode(i);
  double lp = 0.0;
  Vector part(1);
  for (int b = 0; b < copies_; ++b) {
    part[0] = parts[static_cast<std::size_t>(b)];
    lp += base_->log_density(block_theta(theta, b), part);
  }
  return lp;
}

Vector TensorProductModel::score(const ParamPoint& theta, const Vector& x) const {
  validate_theta(theta);
  const int i = symbol_index(x, alphabet_size(), "TensorProductModel");
  const std::vector<int> parts = decode(i);
  Vector s(dim());
  Vector part(1);
  for (int b = 0; b < copies_; ++b) {
    part[0] = parts[static_cast<std::size_t>(b)];
    s.segment(b * base_->dim(), base_->dim()) = base_->score(block_theta(theta, b), part);
  }
  return s;
}

Vector TensorProductModel::sample(const ParamPoint& theta, RngStream& rng) const {
  validate_theta(theta);
  const int m = base_->alphabet_size();
  int idx = 0;
  int stride = 1;
  for (int b = 0; b < copies_; ++b) {
    const Vector xb = base_->sample(block_theta(theta, b), rng);
    idx += static_cast<int>(xb[0]) * stride;
    stride *= m;
  }
  Vector x(1);
  x[0] = idx;
  return x;
}

Vector TensorProductModel::pmf(const ParamPoint& theta) const {
  validate_theta(theta);
  const int m = base_->alphabet_size();
  Vector joint = Vector::Ones(1);
  for (int b = 0; b < copies_; ++b) {
    const Vector pb = base_->pmf(block_theta(theta, b));
    Vector next(joint.size() * m);
    for (int xb = 0; xb < m; ++xb) {
      next.segment(xb * joint.size(), joint.size()) = joint * pb[xb];
    }
    joint.swap(next);
  }
  return joint;
}

Matrix TensorProductModel::score_table(const ParamPoint& theta) const {
  validate_theta(theta);
  const int n = alphabet_size();
  Matrix s(dim(), n);
  Vector x(1);
  for (int i = 0; i < n; ++i) {
    x[0] = i;
    s.col(i) = score(theta, x);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sub-Gaussian certification

SubgaussianCertificate certify_subgaussian(const StatModel& model, const ParamPoint& theta,
                                           const std::vector<double>& lambda_grid,
                                           int direction_count, std::int64_t mc_samples,
                                           RngStream& rng) {
  model.validate_theta(theta);
  if (lambda_grid.empty()) {
    throw std::invalid_argument("certify_subgaussian: empty lambda grid");
  }
  if (direction_count < 1) {
    throw std::invalid_argument("certify_subgaussian: direction_count must be >= 1");
  }

  SubgaussianCertificate cert;
  cert.declared_n = model.subgaussian_param(theta);
  cert.certified = true;
  cert.max_gap = -std::numeric_limits<double>::infinity();

  const int d = model.dim();
  std::vector<Vector> directions;
  for (int j = 0; j < d && static_cast<int>(directions.size()) < direction_count; ++j) {
    Vector u = Vector::Zero(d);
    u[j] = 1.0;
    directions.push_back(u);
    if (static_cast<int>(directions.size()) < direction_count) directions.push_back(-u);
  }
  while (static_cast<int>(directions.size()) < direction_count) {
    Vector u(d);
    for (int j = 0; j < d; ++j) u[j] = rng.normal();
    const double norm = u.norm();
    if (norm < 1e-12) continue;
    directions.push_back(u / norm);
  }

  const bool discrete = model.support() == Support::kDiscrete;
  Vector p;
  Matrix scores;
  std::vector<Vector> draws;
  if (discrete) {
    p = model.pmf(theta);
    scores = model.score_table(theta);
  } else {
    draws.reserve(static_cast<std::size_t>(mc_samples));
    for (std::int64_t s = 0; s < mc_samples; ++s) {
      draws.push_back(model.score(theta, model.sample(theta, rng)));
    }
  }

  for (const Vector& u : directions) {
    for (const double lambda : lambda_grid) {
      const double bound = 0.5 * lambda * lambda * cert.declared_n * cert.declared_n;
      double log_mgf;
      double allowance;
      if (discrete) {
        double mgf = 0.0;
        for (int x = 0; x < p.size(); ++x) {
          mgf += p[x] * std::exp(lambda * u.dot(scores.col(x)));
        }
        log_mgf = std::log(mgf);
        allowance = 1e-12;
      } else {
        MeanAccumulator acc;
        for (const Vector& s : draws) acc.add(std::exp(lambda * u.dot(s)));
        if (!std::isfinite(acc.mean())) {
          cert.certified = false;
          cert.diverged_lambda = lambda;
          continue;
        }
        log_mgf = std::log(acc.mean());
        // Delta method: sd(ln m) ~ sd(m) / m; allow four standard errors.
        allowance = 4.0 * acc.std_error() / acc.mean();
      }
      const double gap = log_mgf - bound;
      if (gap > cert.max_gap) {
        cert.max_gap = gap;
        cert.worst_lambda = lambda;
      }
      if (gap > allowance) cert.certified = false;
    }
  }
  return cert;
}

}  // namespace infobound
