#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "infobound/channels.hpp"
#include "infobound/common.hpp"
#include "infobound/fisher.hpp"
#include "infobound/info.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"

namespace infobound {

enum class Verdict { kHolds, kViolated, kInconclusive };
const char* to_string(Verdict verdict);

// Outcome of a single inequality check lhs <= rhs.
//
// Verdict rule: with exact inputs (uncertainty == 0) the bound holds iff
// lhs <= rhs + 1e-9, the absolute floating-point allowance for exactly tight
// cases.  With Monte Carlo inputs (uncertainty > 0) the bound holds iff
// lhs <= rhs, is violated iff lhs > rhs + 4 * uncertainty, and is
// inconclusive in between.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double uncertainty = 0.0;
  std::map<std::string, double> components;
  Verdict verdict = Verdict::kHolds;
};

BoundReport make_bound_report(std::string name, double lhs, double rhs, double uncertainty,
                              std::map<std::string, double> components = {});

// Gauss-Legendre nodes and weights on [0, 1] (weights sum to 1), computed
// from the symmetric tridiagonal Jacobi matrix.
void gauss_legendre_01(int n, Vector& nodes, Vector& weights);

// Straight-line segment theta0 -> theta1 with a quadrature rule along it.
struct PathSpec {
  ParamPoint theta0;
  ParamPoint theta1;
  Vector nodes;    // in [0, 1]
  Vector weights;  // sum to 1
};
PathSpec linear_path(const ParamPoint& theta0, const ParamPoint& theta1, int n_nodes = 16);
ParamPoint path_point(const PathSpec& path, double lambda);

// How inequality sides that need mutual information are computed.
enum class MiMode { kExact, kMonteCarlo };

// Checks the score-level strong data processing inequality
//   Tr I_Y(theta) <= 2 N^2 I(X; Y)
// for one model/channel pair, where N is the model's declared sub-Gaussian
// score parameter.  Components: trace_fisher_output, mi_nats, mi_std_error,
// subgaussian_n.
BoundReport verify_fisher_bound(const StatModel& model, const Channel& channel,
                                const ParamPoint& theta, MiMode mi_mode = MiMode::kExact,
                                std::int64_t mc_samples = 1000000, RngStream* rng = nullptr);

// Right-hand side 2 N^2 I_total of the same inequality applied to a protocol
// transcript with total mutual information I_total nats.
double transcript_information_bound(double subgaussian_n, double total_mi_nats);

// Minimax lower bound for estimating theta in [-1, 1]^d from a transcript
// whose total mutual information is at most sup_total_mi_nats for every
// theta, for the Gaussian location model with scale sigma (N = 1/sigma):
//   d^2 / ( preconstant * (1/sigma^2) * sup_total_mi_nats + pi^2 d ).
// preconstant = 2 matches the proven constant in front of N^2; other values
// support constant-tightness experiments.
double van_trees_lower_bound(int dim, double sigma, double sup_total_mi_nats,
                             double preconstant = 2.0);

// Checks the two-point bound
//   JS(Q_theta0, Q_theta1) <= (||theta1 - theta0||^2 N^2 / 2) *
//                             integral_path (total transcript MI) d lambda
// for n_nodes independent nodes all communicating through `channel`.  The JS
// side is exact for a single discrete node and Monte Carlo otherwise (needs
// rng); mi_mode selects how the path integral is computed.  Components:
// js_lhs, path_integral_nats, delta_norm_sq, subgaussian_n, lhs_std_error,
// rhs_std_error.
BoundReport verify_js_bound(const StatModel& model, const Channel& channel, int n_nodes,
                            const PathSpec& path, double subgaussian_n,
                            MiMode mi_mode = MiMode::kExact, std::int64_t mc_samples = 1000000,
                            RngStream* rng = nullptr);

// Checks the local quadratic expansion JS(Q_theta, Q_theta+Delta) ~=
// Delta^2 I_Y(theta) / 4 for a scalar model: the ratios
// |JS - Delta^2 I_Y / 4| / Delta^3 should stay bounded as Delta shrinks.
// Delta = 0 contributes a zero ratio.
struct TaylorCheckResult {
  std::vector<double> deltas;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  // Spread max/min over the nonzero deltas; O(1) when the cubic term leads.
  double max_over_min = 0.0;
};
TaylorCheckResult js_taylor_expansion_check(const StatModel& model,
                                            const DiscreteChannel& channel,
                                            const ParamPoint& theta,
                                            const std::vector<double>& deltas);

// Right-hand side K * (ln c)^2 * mi_path_integral_nats of the binary-latent
// information bound specialized to an exponential-twist family with
// likelihood-ratio bound c.  The constant K is not pinned down by theory;
// callers supply it (default 1) and results are labeled non-normative.
double twist_bound_rhs(double ratio_bound_c, double mi_path_integral_nats,
                       double k_constant = 1.0);

}  // namespace infobound
