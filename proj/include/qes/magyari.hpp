#pragma once

#include <Eigen/Dense>

#include "qes/types.hpp"

namespace qes {

// The q one-diagonal 0/1 shift matrices J_1..J_q of shape (N+q) x (N+1).
// J_xi has unit entries at (row n, col n-xi+1); the plet enters the
// eigenproblem through S = sum_xi g_{xi-1} J_xi.
struct ShiftBasis {
  int q = 0;
  int N = 0;
  std::vector<Eigen::MatrixXd> J;  // J[xi-1], each (N+q) x (N+1)

  int rows() const { return N + q; }
  int cols() const { return N + 1; }

  // S(g) = sum_xi g_{xi-1} J_xi.
  Eigen::MatrixXd shift(const EigenPlet& plet) const;

  // (J_xi h)_n = h_{n-xi+1}.
  Eigen::VectorXd apply_shift(int xi, const Eigen::VectorXd& h) const;
};

ShiftBasis make_shift_basis(int q, int N);

// The g-independent part H of the truncated (N+q) x (N+1) system, with the
// intermediate coupling g_q already substituted (the lowest band therefore
// reads 4 f_q (N+q-n)).
struct MagyariSystem {
  QuasiExactModel model;
  Eigen::MatrixXd H;
  ShiftBasis shifts;
};

MagyariSystem build_system(const QuasiExactModel& model);

// H - S(plet).
Eigen::MatrixXd apply(const MagyariSystem& system, const EigenPlet& plet);

// (H - S(plet)) h; every component vanishes on a quasi-exact solution.
Eigen::VectorXd residual(const MagyariSystem& system, const EigenPlet& plet,
                         const WaveVector& wave);

// Raw untruncated element formulas, used for the g-free matrix entries and
// the virtual closing row of the recurrence.
double element_C(int n, double p);                                // superdiagonal
double element_band(const WkbTail& tail, int k, int n, double p); // band k, g_k excluded

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace qes
