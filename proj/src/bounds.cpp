#include "infobound/bounds.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace infobound {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Absolute allowance for exactly tight exact-arithmetic bounds.
constexpr double kExactSlackTol = 1e-9;

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kHolds: return "holds";
    case Verdict::kViolated: return "violated";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

BoundReport make_bound_report(std::string name, double lhs, double rhs, double uncertainty,
                              std::map<std::string, double> components) {
  if (!(uncertainty >= 0.0)) {
    throw std::invalid_argument("make_bound_report: uncertainty must be nonnegative");
  }
  BoundReport report;
  report.name = std::move(name);
  report.lhs = lhs;
  report.rhs = rhs;
  report.slack = rhs - lhs;
  report.uncertainty = uncertainty;
  report.components = std::move(components);
  if (uncertainty == 0.0) {
    report.verdict = lhs <= rhs + kExactSlackTol ? Verdict::kHolds : Verdict::kViolated;
  } else if (lhs <= rhs) {
    report.verdict = Verdict::kHolds;
  } else if (lhs > rhs + 4.0 * uncertainty) {
    report.verdict = Verdict::kViolated;
  } else {
    report.verdict = Verdict::kInconclusive;
  }
  return report;
}

void gauss_legendre_01(int n, Vector& nodes, Vector& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  if (n == 1) {
    nodes[0] = 0.5;
    weights[0] = 1.0;
    return;
  }
  // Golub-Welsch: eigenvalues of the Jacobi matrix for Legendre polynomials
  // are the nodes on [-1, 1]; squared first eigenvector components give the
  // weights (total mass 2).
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_legendre_01: eigenvalue decomposition failed");
  }
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (solver.eigenvalues()[i] + 1.0);
    const double v0 = solver.eigenvectors()(0, i);
    weights[i] = v0 * v0;  // 2 v0^2 on [-1,1], halved by the change of variable
  }
  weights /= weights.sum();
}

PathSpec linear_path(const ParamPoint& theta0, const ParamPoint& theta1, int n_nodes) {
  if (theta0.size() != theta1.size()) {
    throw std::invalid_argument("linear_path: endpoints have different dimensions");
  }
  PathSpec path;
  path.theta0 = theta0;
  path.theta1 = theta1;
  gauss_legendre_01(n_nodes, path.nodes, path.weights);
  return path;
}

ParamPoint path_point(const PathSpec& path, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("path_point: lambda must lie in [0, 1]");
  }
  return path.theta0 + lambda * (path.theta1 - path.theta0);
}

BoundReport verify_fisher_bound(const StatModel& model, const Channel& channel,
                                const ParamPoint& theta, MiMode mi_mode,
                                std::int64_t mc_samples, RngStream* rng) {
  model.validate_theta(theta);
  const double n = model.subgaussian_param(theta);
  const double lhs = fisher_output(model, channel, theta).trace();

  MIEstimate mi;
  if (mi_mode == MiMode::kExact) {
    mi = mutual_information(model, channel, theta);
  } else {
    if (rng == nullptr) {
      throw std::invalid_argument("verify_fisher_bound: Monte Carlo mode needs an RNG stream");
    }
    mi = mi_monte_carlo(model, channel, theta, mc_samples, *rng);
  }

  const double factor = 2.0 * n * n;
  return make_bound_report("fisher_information_vs_mi:" + channel.kind(), lhs,
                           factor * mi.value, factor * mi.std_error,
                           {{"trace_fisher_output", lhs},
                            {"mi_nats", mi.value},
                            {"mi_std_error", mi.std_error},
                            {"subgaussian_n", n}});
}

double transcript_information_bound(double subgaussian_n, double total_mi_nats) {
  if (!(subgaussian_n > 0.0)) {
    throw std::invalid_argument("transcript_information_bound: N must be positive");
  }
  if (!(total_mi_nats >= 0.0)) {
    throw std::invalid_argument("transcript_information_bound: total MI must be nonnegative");
  }
  return 2.0 * subgaussian_n * subgaussian_n * total_mi_nats;
}

double van_trees_lower_bound(int dim, double sigma, double sup_total_mi_nats,
                             double preconstant) {
  if (dim < 1) throw std::invalid_argument("van_trees_lower_bound: dim must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("van_trees_lower_bound: sigma must be positive");
  if (!(sup_total_mi_nats >= 0.0)) {
    throw std::invalid_argument("van_trees_lower_bound: sup total MI must be nonnegative");
  }
  if (!(preconstant > 0.0)) {
    throw std::invalid_argument("van_trees_lower_bound: preconstant must be positive");
  }
  // Bayesian Cramer-Rao with the box prior on [-1, 1]^d: the transcript
  // Fisher trace is bounded by preconstant * N^2 * supMI with N = 1/sigma for
  // the Gaussian location family, and the prior contributes pi^2 d.
  const double d = static_cast<double>(dim);
  const double n_sq = 1.0 / (sigma * sigma);
  return d * d / (preconstant * n_sq * sup_total_mi_nats + kPi * kPi * d);
}

namespace {

// Exact JS between two transcript laws when the per-node output alphabet is
// small enough to enumerate jointly; otherwise empty.
std::optional<DivergenceValue> exact_transcript_js(const StatModel& model,
                                                   const Channel& channel, int n_nodes,
                                                   const ParamPoint& theta0,
                                                   const ParamPoint& theta1) {
  const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel);
  if (dc == nullptr || model.support() != Support::kDiscrete) return std::nullopt;
  double joint = 1.0;
  for (int i = 0; i < n_nodes; ++i) joint *= dc->output_size();
  if (joint > 4096.0) return std::nullopt;

  const Vector q0 = push_forward_discrete(model, *dc, theta0);
  const Vector q1 = push_forward_discrete(model, *dc, theta1);
  // i.i.d. nodes: the transcript pmf is the n-fold product.
  Vector p0 = Vector::Ones(1), p1 = Vector::Ones(1);
  for (int i = 0; i < n_nodes; ++i) {
    Vector n0(p0.size() * q0.size()), n1(p1.size() * q1.size());
    for (int y = 0; y < q0.size(); ++y) {
      n0.segment(y * p0.size(), p0.size()) = p0 * q0[y];
      n1.segment(y * p1.size(), p1.size()) = p1 * q1[y];
    }
    p0.swap(n0);
    p1.swap(n1);
  }
  return js_divergence(p0, p1);
}

}  // namespace

BoundReport verify_js_bound(const StatModel& model, const Channel& channel, int n_nodes,
                            const PathSpec& path, double subgaussian_n, MiMode mi_mode,
                            std::int64_t mc_samples, RngStream* rng) {
  if (n_nodes < 1) throw std::invalid_argument("verify_js_bound: n_nodes must be >= 1");
  if (!(subgaussian_n > 0.0)) {
    throw std::invalid_argument("verify_js_bound: N must be positive");
  }
  model.validate_theta(path.theta0);
  model.validate_theta(path.theta1);

  // Path integral of the total transcript information (n independent nodes).
  double integral = 0.0;
  double integral_se_sq = 0.0;
  for (int k = 0; k < path.nodes.size(); ++k) {
    const ParamPoint theta = path_point(path, path.nodes[k]);
    MIEstimate mi;
    if (mi_mode == MiMode::kExact) {
      mi = mutual_information(model, channel, theta);
    } else {
      if (rng == nullptr) {
        throw std::invalid_argument("verify_js_bound: Monte Carlo MI needs an RNG stream");
      }
      mi = mi_monte_carlo(model, channel, theta, mc_samples, *rng);
    }
    integral += path.weights[k] * n_nodes * mi.value;
    const double se = path.weights[k] * n_nodes * mi.std_error;
    integral_se_sq += se * se;
  }

  const double delta_sq = (path.theta1 - path.theta0).squaredNorm();
  const double factor = 0.5 * delta_sq * subgaussian_n * subgaussian_n;
  const double rhs = factor * integral;
  const double rhs_se = factor * std::sqrt(integral_se_sq);

  // JS side: exact for small discrete transcripts, Monte Carlo otherwise.
  DivergenceValue js;
  if (auto exact = exact_transcript_js(model, channel, n_nodes, path.theta0, path.theta1)) {
    js = *exact;
  } else {
    if (rng == nullptr) {
      throw std::invalid_argument("verify_js_bound: Monte Carlo JS needs an RNG stream");
    }
    const LogDensityFn node_log_q0 = marginal_log_density(model, channel, path.theta0);
    const LogDensityFn node_log_q1 = marginal_log_density(model, channel, path.theta1);
    const int dim_y = channel.output_space().kind == SpaceKind::kContinuous
                          ? channel.output_space().extent
                          : 1;
    // A transcript is the concatenation of the n node messages.
    auto transcript_log = [n_nodes, dim_y](const LogDensityFn& node_log, const Vector& t) {
      double lp = 0.0;
      for (int i = 0; i < n_nodes; ++i) lp += node_log(t.segment(i * dim_y, dim_y));
      return lp;
    };
    auto sampler = [&model, &channel, n_nodes, dim_y](const ParamPoint& theta) {
      return [&model, &channel, n_nodes, dim_y, theta](RngStream& stream) {
        Vector t(n_nodes * dim_y);
        for (int i = 0; i < n_nodes; ++i) {
          const Vector x = model.sample(theta, stream);
          t.segment(i * dim_y, dim_y) = channel.sample(x, stream);
        }
        return t;
      };
    };
    js = js_divergence_mc(
        [&](const Vector& t) { return transcript_log(node_log_q0, t); },
        [&](const Vector& t) { return transcript_log(node_log_q1, t); },
        sampler(path.theta0), sampler(path.theta1), mc_samples, *rng);
  }

  const double uncertainty = std::sqrt(js.std_error * js.std_error + rhs_se * rhs_se);
  return make_bound_report("js_vs_path_information:" + channel.kind(), js.value, rhs,
                           uncertainty,
                           {{"js_lhs", js.value},
                            {"path_integral_nats", integral},
                            {"delta_norm_sq", delta_sq},
                            {"subgaussian_n", subgaussian_n},
                            {"lhs_std_error", js.std_error},
                            {"rhs_std_error", rhs_se}});
}

TaylorCheckResult js_taylor_expansion_check(const StatModel& model,
                                            const DiscreteChannel& channel,
                                            const ParamPoint& theta,
                                            const std::vector<double>& deltas) {
  if (model.dim() != 1) {
    throw std::invalid_argument("js_taylor_expansion_check: needs a scalar parameter");
  }
  if (deltas.empty()) {
    throw std::invalid_argument("js_taylor_expansion_check: empty delta grid");
  }
  const double fisher = fisher_output_exact(model, channel, theta).trace();
  const Vector base = push_forward_discrete(model, channel, theta);

  TaylorCheckResult result;
  result.deltas = deltas;
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (const double delta : deltas) {
    double ratio = 0.0;
    if (delta != 0.0) {
      ParamPoint shifted = theta;
      shifted[0] += delta;
      const Vector moved = push_forward_discrete(model, channel, shifted);
      const double js = js_divergence(base, moved).value;
      const double quadratic = 0.25 * delta * delta * fisher;
      ratio = std::abs(js - quadratic) / std::abs(delta * delta * delta);
      min_nonzero = std::min(min_nonzero, ratio);
    }
    result.ratios.push_back(ratio);
    result.max_ratio = std::max(result.max_ratio, ratio);
  }
  result.max_over_min =
      std::isfinite(min_nonzero) && min_nonzero > 0.0 ? result.max_ratio / min_nonzero : 0.0;
  return result;
}

double twist_bound_rhs(double ratio_bound_c, double mi_path_integral_nats, double k_constant) {
  if (!(ratio_bound_c >= 1.0)) {
    throw std::invalid_argument("twist_bound_rhs: the likelihood-ratio bound c must be >= 1");
  }
  if (!(mi_path_integral_nats >= 0.0)) {
    throw std::invalid_argument("twist_bound_rhs: the path integral must be nonnegative");
  }
  if (!(k_constant > 0.0)) {
    throw std::invalid_argument("twist_bound_rhs: K must be positive");
  }
  const double log_c = std::log(ratio_bound_c);
  return k_constant * log_c * log_c * mi_path_integral_nats;
}

}  // namespace infobound
