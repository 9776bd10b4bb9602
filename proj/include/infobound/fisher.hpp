#pragma once

#include <cstdint>
#include <string>

#include "infobound/channels.hpp"
#include "infobound/common.hpp"
#include "infobound/models.hpp"
#include "infobound/rng.hpp"

namespace infobound {

// Fisher information matrix at a parameter point, tagged with how it was
// computed ("exact_discrete", "closed_form_gaussian", ...).
struct FisherMatrix {
  Matrix entries;
  ParamPoint theta;
  std::string method;

  double trace() const { return entries.trace(); }
};

// Fisher information of the raw sample X ~ p_theta.
FisherMatrix fisher_input(const StatModel& model, const ParamPoint& theta);

// Fisher information of the channel output Y for a discrete model pushed
// through a discrete channel, computed from the exact output pmf and its
// analytic derivative d m(y) = sum_x W(y|x) p(x) S(x).  Falls back to central
// finite differences of ln m(y) with step fd_step if the model provides no
// score table.  Output cells with mass below 1e-300 are dropped; the count of
// dropped cells is written to *dropped_outputs when given.
FisherMatrix fisher_output_exact(const StatModel& model, const DiscreteChannel& channel,
                                 const ParamPoint& theta, double fd_step = 1e-5,
                                 int* dropped_outputs = nullptr);

// Fisher information of the channel output for any supported pair: discrete
// pairs via fisher_output_exact, Gaussian+AWGN and Gaussian+quantizer in
// closed form.
FisherMatrix fisher_output(const StatModel& model, const Channel& channel,
                           const ParamPoint& theta);

enum class DecompositionMethod { kExact, kMonteCarlo };

// Tr I_Y(theta) computed through the conditional-score decomposition
// E_Y || E_X[S_theta(X) | Y] ||^2.  The exact method enumerates discrete
// outputs (or uses the Gaussian closed form); Monte Carlo samples Y and
// evaluates the conditional expectation exactly for each draw.
struct TraceDecomposition {
  double trace = 0.0;
  // Per-output contributions m(y) ||E[S|y]||^2 (exact discrete only).
  Vector per_output;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};
TraceDecomposition fisher_trace_decomposition(const StatModel& model, const Channel& channel,
                                              const ParamPoint& theta,
                                              DecompositionMethod method,
                                              std::int64_t n_samples = 0,
                                              RngStream* rng = nullptr);

// Cross-check of the output Fisher information against the local expansion
// KL(m_theta || m_{theta+h e_j}) ~= h^2 I_jj / 2: returns the maximum
// relative deviation of 2 KL / h^2 from the diagonal entries.  step_warning
// is set when h is small enough (< 1e-7) for cancellation to dominate.
struct FdCheckResult {
  double max_rel_deviation = 0.0;
  bool step_warning = false;
};
FdCheckResult fisher_fd_check(const StatModel& model, const DiscreteChannel& channel,
                              const ParamPoint& theta, double h);

}  // namespace infobound
