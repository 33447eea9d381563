#pragma once

#include <span>

#include "qes/large_ell.hpp"

namespace qes {

// Rows 0..N+q-1 of (H-S) h plus the virtual closing row N+q of the
// untruncated recurrence, whose only in-range coefficient vanishes
// analytically once g_q is the truncation coupling.
Eigen::VectorXd recurrence_residual(const QuasiExactModel& model, const EigenPlet& plet,
                                    const WaveVector& wave);

// Pointwise Schrodinger residual max_x |-psi'' + (V - E) psi| / (1 + |E psi|)
// with analytic derivatives of the exp(-P) * polynomial form.  For p outside
// {0, 1} the centrifugal term l(l+1)/x^2, l = p-1, is included (it vanishes
// identically on the physical channels).
double ode_residual(const QuasiExactModel& model, const EigenPlet& plet,
                    const WaveVector& wave, std::span<const double> sample_points);

// 16 Chebyshev-distributed points on [0.1, x_turn + 1], where x_turn is the
// outermost classical turning point estimate.
std::vector<double> default_sample_points(const QuasiExactModel& model, const EigenPlet& plet);

struct ConvergenceRow {
  int K = 0;
  std::vector<double> errors;  // one per sigma, aligned with the input list
  double slope = 0.0;          // log-log least-squares slope of error vs sigma
};

// Empirical series-vs-Newton error table: for each truncation order K and
// each sigma, the max-abs plet difference against the nearest Newton root of
// the assembled stack, with the fitted convergence slope per K.
std::vector<ConvergenceRow> convergence_report(const PerturbationProblem& problem,
                                               const ZeroOrderSolution& z, int K_max,
                                               std::span<const double> sigmas,
                                               int starts = 64, std::uint64_t seed = 1);

}  // namespace qes
