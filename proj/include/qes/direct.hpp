#pragma once

#include <cstdint>

#include "qes/magyari.hpp"

namespace qes {

enum class SolutionMethod { closed_form, newton };

struct QesSolution {
  EigenPlet plet;
  WaveVector wave;
  double energy = 0.0;          // -g_0; kept explicit so q = 0 works too
  double residual_norm = 0.0;   // max-abs recurrence residual
  SolutionMethod classification = SolutionMethod::closed_form;
  bool singular_jacobian = false;
};

struct SolutionSet {
  std::vector<QesSolution> solutions;
  std::string diagnostic;  // empty unless something was dropped or failed
};

// Harmonic closed form (q = 0): E = f_0 (4m + 2p + 1), with the finite
// Taylor string obtained by back-substitution through the bidiagonal rows.
QesSolution solve_harmonic(double f0, double p, int m);

// Sextic closed form (q = 1, f_1 = 1): real eigenvalues g_0 of the
// (N+1) x (N+1) nonsymmetric tridiagonal matrix, waves normalized h_N = 1.
SolutionSet solve_sextic(double f0, int N, double p);

// N = 0 closed form, all q: E = f_0 (2p+1) and the quadratic coupling chain.
QesSolution solve_n0(const WkbTail& tail, double p);

struct NewtonOptions {
  int starts = 64;
  std::uint64_t seed = 0;
  int max_iterations = 40;
  double residual_tol = 1e-12;    // convergence target
  double accept_tol = 1e-9;       // max-abs residual for an accepted root
  double dedup_tol = 1e-8;
  double radius = 0.0;            // start box half-width; 0 = derive from matrix
};

// Multistart damped Newton on the square bilinear system
//   (H - sum_xi g_xi J_xi) h = 0,  h_N = 1,
// in the N+q unknowns (g_0..g_{q-1}, h_0..h_{N-1}).  Deterministic in
// (starts, seed); real roots only; deduplicated, sorted by plet then wave.
SolutionSet solve_newton(const Eigen::MatrixXd& H, const ShiftBasis& shifts,
                         const NewtonOptions& options);

// Convenience wrapper; the start radius defaults to
// R = 1 + max|f_k| (4N + 2q + 2p + 1).
SolutionSet solve_newton(const MagyariSystem& system, const NewtonOptions& options);

}  // namespace qes
