#pragma once

#include "qes/direct.hpp"

namespace qes {

// A stack of perturbation orders H^(0), H^(1), ..., all (N+q) x (N+1);
// orders beyond the stack are zero.
struct PerturbationProblem {
  int q = 0;
  int N = 0;
  std::vector<Eigen::MatrixXd> H_stack;
  ShiftBasis shifts;

  const Eigen::MatrixXd& H0() const { return H_stack.at(0); }
  // H^(k), zero beyond the stack.
  Eigen::MatrixXd order(int k) const {
    if (k < static_cast<int>(H_stack.size())) return H_stack[k];
    return Eigen::MatrixXd::Zero(N + q, N + 1);
  }
  // sum_k lambda^k H^(k).
  Eigen::MatrixXd assemble(double lambda) const;
};

PerturbationProblem make_problem(int q, int N, std::vector<Eigen::MatrixXd> stack);

// A left null row of H^(0)-S^(0) compressed to N+1 entries: the expanded
// row has rho at the listed support positions and zeros elsewhere.
struct ReductionPair {
  std::vector<int> support;  // N+1 ascending row indices
  int window_offset = -1;    // >= 0 when the support is the contiguous window
  Eigen::VectorXd rho;       // N+1 entries

  Eigen::VectorXd expanded(int rows) const;
  // (Pi v)_m = v_{support[m]} for an (N+q)-vector v.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
};

struct ZeroOrderSolution {
  EigenPlet plet0;
  WaveVector wave0;
  Eigen::MatrixXd left_basis;  // >= q rows of length N+q spanning the left null space
  std::vector<ReductionPair> reductions;  // q of them, expanded rows full rank
  Eigen::MatrixXd F;          // q x q matrix F_{j,xi} = rho_j . Pi_j J_xi |0>
  Eigen::FullPivLU<Eigen::MatrixXd> F_lu;
};

struct ProjectorPair {
  Eigen::MatrixXd right_basis;   // N x (N+1) orthonormal rows, each _|_ wave0
  Eigen::MatrixXd left_basis_Q;  // N x (N+q) orthonormal rows, _|_ reduction rows
  Eigen::MatrixXd restricted;    // N x N  = Q_L (H0-S0) Q_R^T
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 0.0;
};

struct CorrectionOrder {
  EigenPlet plet;        // S^(k) coefficients
  Eigen::VectorXd wave;  // |k>, length N+1, orthogonal to wave0
};

struct CorrectionSeries {
  std::vector<CorrectionOrder> orders;         // orders[k-1] holds order k
  std::vector<Eigen::MatrixXd> left_orders;    // optional; q x (N+q) per order

  int K() const { return static_cast<int>(orders.size()); }
};

// Orthonormal basis of the left null space of M0, computed by SVD with a
// 1e-10 relative threshold.  Throws degeneracy_error if fewer than q rows.
Eigen::MatrixXd left_null_basis(const Eigen::MatrixXd& M0, int q);

// Factor the left null space into q linearly independent reduction pairs,
// preferring the offset windows j-1 and falling back to arbitrary index
// subsets chosen greedily for conditioning.
std::vector<ReductionPair> reduce_left_vectors(const Eigen::MatrixXd& basis, int q, int N);

// Newton-solve the zero-order problem and attach the left structure.
std::vector<ZeroOrderSolution> solve_zero_order(const PerturbationProblem& problem,
                                                int starts, std::uint64_t seed);

ProjectorPair build_projectors(const ZeroOrderSolution& z, const Eigen::MatrixXd& M0);

// |known^(k-1)> = sum_{m=1}^{k-1} [S^(m)-H^(m)] |k-m>  -  H^(k) |0>.
Eigen::VectorXd known_vector(const PerturbationProblem& problem, const CorrectionSeries& series,
                             const Eigen::VectorXd& wave0, int k);

// Solve sum_xi F_{j,xi} g_{xi-1}^(k) = -rho_j . Pi_j |known> for the k-th plet.
EigenPlet coupling_corrections(const ZeroOrderSolution& z, const Eigen::VectorXd& known,
                               const ShiftBasis& shifts);

// |k> = Q_R [Q_L (H0-S0) Q_R]^{-1} Q_L (|known> + S^(k) |0>).
Eigen::VectorXd wave_correction(const ProjectorPair& pp, const Eigen::VectorXd& known,
                                const EigenPlet& plet_k, const Eigen::VectorXd& wave0,
                                const ShiftBasis& shifts);

// Row corrections <_xi <k| = <known| Q_R [Q_L (H0-S0) Q_R]^{-1} Q_L.
Eigen::MatrixXd left_corrections(const ZeroOrderSolution& z, const ProjectorPair& pp,
                                 const PerturbationProblem& problem,
                                 const CorrectionSeries& series, int k);

// Iterate known -> coupling -> wave for k = 1..K (plus left rows on request).
CorrectionSeries run(const PerturbationProblem& problem, const ZeroOrderSolution& z, int K,
                     bool with_left = false);

// plet0 + sum lambda^k plet_k and the renormalized (h_N = 1) wave.
std::pair<EigenPlet, WaveVector> evaluate_series(const CorrectionSeries& series,
                                                 const ZeroOrderSolution& z, double lambda);

}  // namespace qes
