#include "infobound/channels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infobound {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int symbol_index(const Vector& v, int alphabet, const char* what) {
  if (v.size() != 1) {
    throw std::domain_error(std::string(what) + ": discrete point must be a length-1 index vector");
  }
  const double raw = v[0];
  if (!(raw == std::floor(raw))) {
    throw std::domain_error(std::string(what) + ": symbol index must be integral");
  }
  const int i = static_cast<int>(raw);
  if (i < 0 || i >= alphabet) {
    throw std::domain_error(std::string(what) + ": symbol index " + std::to_string(i) +
                            " outside alphabet of size " + std::to_string(alphabet));
  }
  return i;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// ---------------------------------------------------------------------------
// DiscreteChannel

DiscreteChannel::DiscreteChannel(Matrix transition) : transition_(std::move(transition)) {
  if (transition_.rows() < 1 || transition_.cols() < 1) {
    throw std::invalid_argument("DiscreteChannel: transition matrix must be nonempty");
  }
  for (int i = 0; i < transition_.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < transition_.cols(); ++j) {
      const double w = transition_(i, j);
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("DiscreteChannel: entry (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") must be a finite nonnegative number");
      }
      row_sum += w;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      throw std::invalid_argument("DiscreteChannel: row " + std::to_string(i) +
                                  " sums to " + std::to_string(row_sum) +
                                  ", expected 1 within 1e-12");
    }
  }
}

double DiscreteChannel::kernel_log_density(const Vector& x, const Vector& y) const {
  const int xi = symbol_index(x, input_size(), "DiscreteChannel input");
  const int yi = symbol_index(y, output_size(), "DiscreteChannel output");
  const double w = transition_(xi, yi);
  return w > 0.0 ? std::log(w) : kNegInf;
}

Vector DiscreteChannel::sample(const Vector& x, RngStream& rng) const {
  const int xi = symbol_index(x, input_size(), "DiscreteChannel input");
  Vector y(1);
  y[0] = static_cast<double>(rng.discrete(transition_.row(xi)));
  return y;
}

// ---------------------------------------------------------------------------
// RandomizedResponseChannel

namespace {

Matrix rr_matrix(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("RandomizedResponseChannel: epsilon must be positive and finite");
  }
  // flip <= 1/2 <= keep and keep + flip == 1 exactly in floating point.
  const double flip = 1.0 / (1.0 + std::exp(epsilon));
  const double keep = 1.0 - flip;
  Matrix m(2, 2);
  m << keep, flip, flip, keep;
  return m;
}

}  // namespace

RandomizedResponseChannel::RandomizedResponseChannel(double epsilon)
    : DiscreteChannel(rr_matrix(epsilon)), epsilon_(epsilon) {}

// ---------------------------------------------------------------------------
// AwgnChannel

AwgnChannel::AwgnChannel(double sigma_noise, int dim) : sigma_noise_(sigma_noise), dim_(dim) {
  if (!(sigma_noise > 0.0) || !std::isfinite(sigma_noise)) {
    throw std::invalid_argument("AwgnChannel: sigma_noise must be positive and finite");
  }
  if (dim < 1) {
    throw std::invalid_argument("AwgnChannel: dim must be >= 1");
  }
}

double AwgnChannel::kernel_log_density(const Vector& x, const Vector& y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw std::domain_error("AwgnChannel: point has wrong dimension");
  }
  const double q = (y - x).squaredNorm() / (2.0 * sigma_noise_ * sigma_noise_);
  return -0.5 * dim_ * std::log(2.0 * kPi * sigma_noise_ * sigma_noise_) - q;
}

Vector AwgnChannel::sample(const Vector& x, RngStream& rng) const {
  if (x.size() != dim_) {
    throw std::domain_error("AwgnChannel: point has wrong dimension");
  }
  Vector y(dim_);
  for (int j = 0; j < dim_; ++j) y[j] = x[j] + sigma_noise_ * rng.normal();
  return y;
}

// ---------------------------------------------------------------------------
// QuantizerChannel

QuantizerChannel::QuantizerChannel(int bits, double lo, double hi, bool dither)
    : bits_(bits), lo_(lo), hi_(hi), dither_(dither) {
  if (bits < 1 || bits > 20) {
    throw std::invalid_argument("QuantizerChannel: bits must lie in [1, 20]");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("QuantizerChannel: need a finite range with lo < hi");
  }
  n_bins_ = 1 << bits_;
  width_ = (hi_ - lo_) / n_bins_;
}

double QuantizerChannel::lower_edge(int bin) const {
  if (bin < 0 || bin >= n_bins_) throw std::domain_error("QuantizerChannel: bin out of range");
  return bin == 0 ? -std::numeric_limits<double>::infinity() : lo_ + bin * width_;
}

double QuantizerChannel::upper_edge(int bin) const {
  if (bin < 0 || bin >= n_bins_) throw std::domain_error("QuantizerChannel: bin out of range");
  return bin == n_bins_ - 1 ? std::numeric_limits<double>::infinity() : lo_ + (bin + 1) * width_;
}

int QuantizerChannel::bin_of(double x) const {
  // Values on an interior edge land in the right bin; the outer bins absorb
  // everything beyond the range.
  const double t = std::floor((x - lo_) / width_);
  if (t < 0.0) return 0;
  if (t >= n_bins_) return n_bins_ - 1;
  return static_cast<int>(t);
}

Vector QuantizerChannel::output_pmf_given(double x) const {
  Vector p = Vector::Zero(n_bins_);
  if (!dither_) {
    p[bin_of(x)] = 1.0;
    return p;
  }
  // x + U with U ~ Uniform[-w/2, w/2) spreads mass over the bins overlapping
  // [x - w/2, x + w/2).
  const double a = x - 0.5 * width_;
  const double b = x + 0.5 * width_;
  const int first = bin_of(a);
  const int last = bin_of(b);
  for (int j = first; j <= last; ++j) {
    const double l = std::max(a, lower_edge(j));
    const double u = std::min(b, upper_edge(j));
    if (u > l) p[j] += (u - l) / width_;
  }
  return p;
}

double QuantizerChannel::kernel_log_density(const Vector& x, const Vector& y) const {
  if (!dither_) {
    throw std::logic_error(
        "QuantizerChannel: the undithered quantizer is deterministic and has no "
        "conditional density; use output_pmf_given / exact output pmfs instead");
  }
  if (x.size() != 1) throw std::domain_error("QuantizerChannel: input must be scalar");
  const int yi = symbol_index(y, n_bins_, "QuantizerChannel output");
  const double w = output_pmf_given(x[0])[yi];
  return w > 0.0 ? std::log(w) : kNegInf;
}

Vector QuantizerChannel::sample(const Vector& x, RngStream& rng) const {
  if (x.size() != 1) throw std::domain_error("QuantizerChannel: input must be scalar");
  double v = x[0];
  if (dither_) v += width_ * (rng.uniform() - 0.5);
  Vector y(1);
  y[0] = static_cast<double>(bin_of(v));
  return y;
}

// ---------------------------------------------------------------------------
// Factories

DiscreteChannel bsc(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bsc: crossover probability must lie in [0, 1]");
  }
  Matrix m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return DiscreteChannel(m);
}

DiscreteChannel binary_erasure_channel(double erasure_prob) {
  if (!(erasure_prob >= 0.0 && erasure_prob <= 1.0)) {
    throw std::invalid_argument("binary_erasure_channel: erasure probability must lie in [0, 1]");
  }
  Matrix m(2, 3);
  m << 1.0 - erasure_prob, erasure_prob, 0.0, 0.0, erasure_prob, 1.0 - erasure_prob;
  return DiscreteChannel(m);
}

DiscreteChannel identity_channel(int alphabet_size) {
  if (alphabet_size < 1) {
    throw std::invalid_argument("identity_channel: alphabet size must be >= 1");
  }
  return DiscreteChannel(Matrix::Identity(alphabet_size, alphabet_size));
}

DiscreteChannel tensor_power(const DiscreteChannel& channel, int copies) {
  if (copies < 1) {
    throw std::invalid_argument("tensor_power: copies must be >= 1");
  }
  const Matrix& w = channel.matrix();
  Matrix joint = Matrix::Ones(1, 1);
  for (int b = 0; b < copies; ++b) {
    // Kronecker product with block index b as the most significant digit,
    // matching the little-endian joint encoding of TensorProductModel.
    Matrix next(joint.rows() * w.rows(), joint.cols() * w.cols());
    for (int xi = 0; xi < w.rows(); ++xi) {
      for (int yi = 0; yi < w.cols(); ++yi) {
        next.block(xi * joint.rows(), yi * joint.cols(), joint.rows(), joint.cols()) =
            joint * w(xi, yi);
      }
    }
    joint.swap(next);
  }
  return DiscreteChannel(joint);
}

// ---------------------------------------------------------------------------
// Pushforwards

Vector push_forward_discrete(const StatModel& model, const DiscreteChannel& channel,
                             const ParamPoint& theta) {
  if (model.support() != Support::kDiscrete) {
    throw std::invalid_argument("push_forward_discrete: model must have discrete support");
  }
  const Vector p = model.pmf(theta);
  if (p.size() != channel.input_size()) {
    throw std::invalid_argument("push_forward_discrete: model alphabet of size " +
                                std::to_string(p.size()) + " does not match channel input of size " +
                                std::to_string(channel.input_size()));
  }
  return channel.matrix().transpose() * p;
}

namespace {

// Probability and first moment of N(mean, sd^2) restricted to [l, u]:
//   P = \int_l^u phi,   M = \int_l^u x phi = mean * P + sd^2 (phi(l) - phi(u)).
struct PartialMoment {
  double prob;
  double first;
};

PartialMoment gaussian_partial_moment(double mean, double sd, double l, double u) {
  const double zl = (l - mean) / sd;
  const double zu = (u - mean) / sd;
  const double pl = std::isfinite(l) ? normal_pdf(zl) / sd : 0.0;
  const double pu = std::isfinite(u) ? normal_pdf(zu) / sd : 0.0;
  const double prob = normal_cdf(zu) - normal_cdf(zl);
  return {prob, mean * prob + sd * sd * (pl - pu)};
}

double band_probability(double mean, double sd, double l, double u) {
  return normal_cdf((u - mean) / sd) - normal_cdf((l - mean) / sd);
}

}  // namespace

Vector push_forward_gaussian_quantizer(const GaussianLocation& model,
                                       const QuantizerChannel& channel,
                                       const ParamPoint& theta) {
  if (model.dim() != 1) {
    throw std::invalid_argument("push_forward_gaussian_quantizer: model must be scalar");
  }
  model.validate_theta(theta);
  const double mean = theta[0];
  const double sd = model.sigma();
  const int nb = channel.n_bins();
  Vector p(nb);

  if (!channel.dithered()) {
    for (int j = 0; j < nb; ++j) {
      p[j] = band_probability(mean, sd, channel.lower_edge(j), channel.upper_edge(j));
    }
    return p;
  }

  // With dither, p(j | x) is piecewise linear in x: a unit tent of width 2w
  // around the bin center for interior bins, and saturating ramps for the two
  // outer bins.  Integrate each linear piece against the Gaussian via partial
  // moments.
  const double w = channel.bin_width();
  auto linear_piece = [&](double a, double b, double l, double u) {
    // integral of (a + b x) phi over [l, u]
    const PartialMoment m = gaussian_partial_moment(mean, sd, l, u);
    return a * m.prob + b * m.first;
  };
  for (int j = 0; j < nb; ++j) {
    const double le = channel.lower_edge(j);
    const double ue = channel.upper_edge(j);
    double mass = 0.0;
    if (j == 0) {
      // ramp: 1 for x <= ue - w/2, down to 0 at x = ue + w/2
      mass += band_probability(mean, sd, -std::numeric_limits<double>::infinity(), ue - 0.5 * w);
      mass += linear_piece((ue + 0.5 * w) / w, -1.0 / w, ue - 0.5 * w, ue + 0.5 * w);
    } else if (j == nb - 1) {
      mass += linear_piece(-(le - 0.5 * w) / w, 1.0 / w, le - 0.5 * w, le + 0.5 * w);
      mass += band_probability(mean, sd, le + 0.5 * w, std::numeric_limits<double>::infinity());
    } else {
      const double c = 0.5 * (le + ue);
      mass += linear_piece(1.0 - c / w, 1.0 / w, c - w, c);   // rising side
      mass += linear_piece(1.0 + c / w, -1.0 / w, c, c + w);  // falling side
    }
    p[j] = mass;
  }
  return p;
}

Vector push_forward_gaussian_quantizer_dtheta(const GaussianLocation& model,
                                              const QuantizerChannel& channel,
                                              const ParamPoint& theta) {
  if (model.dim() != 1) {
    throw std::invalid_argument("push_forward_gaussian_quantizer_dtheta: model must be scalar");
  }
  model.validate_theta(theta);
  const double mean = theta[0];
  const double sd = model.sigma();
  const int nb = channel.n_bins();
  Vector dp(nb);

  auto pdf_at = [&](double x) {
    return std::isfinite(x) ? normal_pdf((x - mean) / sd) / sd : 0.0;
  };

  if (!channel.dithered()) {
    // d/dtheta [Phi(u) - Phi(l)] = phi(l) - phi(u) in the location parameter.
    for (int j = 0; j < nb; ++j) {
      dp[j] = pdf_at(channel.lower_edge(j)) - pdf_at(channel.upper_edge(j));
    }
    return dp;
  }

  // d m(j) / dtheta = \int p(j|x) (-d phi/dx) dx = \int (d p(j|x)/dx) phi dx
  // by parts; the tent/ramp derivative is piecewise constant +-1/w, so each
  // bin derivative is a signed sum of Gaussian band probabilities.
  const double w = channel.bin_width();
  for (int j = 0; j < nb; ++j) {
    const double le = channel.lower_edge(j);
    const double ue = channel.upper_edge(j);
    double d = 0.0;
    if (j == 0) {
      d -= band_probability(mean, sd, ue - 0.5 * w, ue + 0.5 * w) / w;
    } else if (j == nb - 1) {
      d += band_probability(mean, sd, le - 0.5 * w, le + 0.5 * w) / w;
    } else {
      const double c = 0.5 * (le + ue);
      d += band_probability(mean, sd, c - w, c) / w;
      d -= band_probability(mean, sd, c, c + w) / w;
    }
    dp[j] = d;
  }
  return dp;
}

}  // namespace infobound
