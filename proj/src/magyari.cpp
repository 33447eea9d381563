#include "qes/magyari.hpp"

#include "qes/oscillator.hpp"

namespace qes {

Eigen::MatrixXd ShiftBasis::shift(const EigenPlet& plet) const {
  if (plet.q() != q)
    throw std::invalid_argument("ShiftBasis::shift: plet length mismatch");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows(), cols());
  for (int xi = 1; xi <= q; ++xi) S += plet.g[xi - 1] * J[xi - 1];
  return S;
}

Eigen::VectorXd ShiftBasis::apply_shift(int xi, const Eigen::VectorXd& h) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rows());
  for (int n = 0; n < rows(); ++n) {
    const int m = n - xi + 1;
    if (m >= 0 && m < cols()) out[n] = h[m];
  }
  return out;
}

ShiftBasis make_shift_basis(int q, int N) {
  ShiftBasis basis;
  basis.q = q;
  basis.N = N;
  basis.J.reserve(q);
  for (int xi = 1; xi <= q; ++xi) {
    Eigen::MatrixXd Jx = Eigen::MatrixXd::Zero(N + q, N + 1);
    for (int n = 0; n < N + q; ++n) {
      const int m = n - xi + 1;
      if (m >= 0 && m <= N) Jx(n, m) = 1.0;
    }
    basis.J.push_back(std::move(Jx));
  }
  return basis;
}

double element_C(int n, double p) {
  return (2.0 * n + 2.0) * (2.0 * n + 2.0 * p + 1.0);
}

double element_band(const WkbTail& tail, int k, int n, double p) {
  // Band k of row n without the -g_k shift: -f_k (4n+2p+1-2k) + sum_{j<k} f_j f_{k-1-j}.
  double cross = 0.0;
  for (int j = 0; j <= k - 1; ++j) cross += tail.f[j] * tail.f[k - 1 - j];
  return -tail.f[k] * (4.0 * n + 2.0 * p + 1.0 - 2.0 * k) + cross;
}

MagyariSystem build_system(const QuasiExactModel& model) {
  model.tail.validate();
  const int q = model.q();
  const int N = model.N;
  const double p = model.channel.p;

  MagyariSystem system;
  system.model = model;
  system.shifts = make_shift_basis(q, N);
  system.H = Eigen::MatrixXd::Zero(N + q, N + 1);

  for (int n = 0; n < N + q; ++n) {
    if (n + 1 <= N) system.H(n, n + 1) = element_C(n, p);
    for (int k = 0; k <= q; ++k) {
      const int m = n - k;
      if (m < 0 || m > N) continue;
      double e = element_band(model.tail, k, n, p);
      // g_q is fixed by the truncation condition; the lowest band then
      // collapses to 4 f_q (N+q-n).
      if (k == q) e -= model.g_q;
      system.H(n, m) = e;
    }
  }
  return system;
}

Eigen::MatrixXd apply(const MagyariSystem& system, const EigenPlet& plet) {
  return system.H - system.shifts.shift(plet);
}

Eigen::VectorXd residual(const MagyariSystem& system, const EigenPlet& plet,
                         const WaveVector& wave) {
  if (wave.N() != system.model.N)
    throw std::invalid_argument("residual: wave length mismatch");
  return apply(system, plet) * to_eigen(wave.h);
}

}  // namespace qes
