#include "qes/direct.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "qes/oscillator.hpp"

namespace qes {

namespace {

// Full unknown vector (plet, h_0..h_{N-1}) used for dedup and ordering.
Eigen::VectorXd pack(const QesSolution& s) {
  const int q = s.plet.q();
  const int N = s.wave.N();
  Eigen::VectorXd x(q + N);
  for (int i = 0; i < q; ++i) x[i] = s.plet.g[i];
  for (int i = 0; i < N; ++i) x[q + i] = s.wave.h[i];
  return x;
}

double system_residual_norm(const Eigen::MatrixXd& H, const ShiftBasis& shifts,
                            const EigenPlet& plet, const Eigen::VectorXd& h) {
  Eigen::VectorXd r = H * h;
  for (int xi = 1; xi <= shifts.q; ++xi)
    r -= plet.g[xi - 1] * shifts.apply_shift(xi, h);
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

// Packed unknowns are x = (g_1..g_q, h_0..h_{N-1}) with h_N fixed at 1.
void unpack_state(const ShiftBasis& shifts, const Eigen::VectorXd& v, EigenPlet& plet,
                  Eigen::VectorXd& h) {
  plet.g.assign(v.data(), v.data() + shifts.q);
  h.resize(shifts.N + 1);
  for (int i = 0; i < shifts.N; ++i) h[i] = v[shifts.q + i];
  h[shifts.N] = 1.0;
}

Eigen::MatrixXd system_jacobian(const Eigen::MatrixXd& H, const ShiftBasis& shifts,
                                const Eigen::VectorXd& v) {
  const int q = shifts.q;
  const int N = shifts.N;
  const int dim = N + q;
  EigenPlet plet;
  Eigen::VectorXd h;
  unpack_state(shifts, v, plet, h);
  Eigen::MatrixXd Hm = H;
  for (int xi = 1; xi <= q; ++xi) Hm -= plet.g[xi - 1] * shifts.J[xi - 1];
  Eigen::MatrixXd Jm(dim, dim);
  for (int xi = 1; xi <= q; ++xi) Jm.col(xi - 1) = -shifts.apply_shift(xi, h);
  for (int m = 0; m < N; ++m) Jm.col(q + m) = Hm.col(m);
  return Jm;
}

// Damped Newton iteration on the packed unknowns x.  Iterates while the max-abs residual improves, which
// polishes roots to the rounding floor instead of stopping at a tolerance.
// Returns the final residual norm.
double newton_iterate(const Eigen::MatrixXd& H, const ShiftBasis& shifts,
                      Eigen::VectorXd& x, int max_iterations, double floor) {
  const int q = shifts.q;
  const int N = shifts.N;
  const int dim = N + q;

  auto eval = [&](const Eigen::VectorXd& v) {
    EigenPlet plet;
    Eigen::VectorXd h;
    unpack_state(shifts, v, plet, h);
    Eigen::VectorXd r = H * h;
    for (int xi = 1; xi <= q; ++xi) r -= plet.g[xi - 1] * shifts.apply_shift(xi, h);
    return r;
  };

  Eigen::VectorXd r = eval(x);
  double rn = dim ? r.cwiseAbs().maxCoeff() : 0.0;
  for (int it = 0; it < max_iterations && rn > floor; ++it) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system_jacobian(H, shifts, x));
    if (lu.rank() < dim) break;
    Eigen::VectorXd step = lu.solve(-r);
    // Backtracking halving on residual-norm increase.
    double alpha = 1.0;
    Eigen::VectorXd xn;
    Eigen::VectorXd rnew;
    double rn_new = rn;
    for (int bt = 0; bt < 30; ++bt) {
      xn = x + alpha * step;
      rnew = eval(xn);
      rn_new = rnew.cwiseAbs().maxCoeff();
      if (rn_new < rn) break;
      alpha *= 0.5;
    }
    if (!(rn_new < rn)) break;  // stalled
    x = xn;
    r = rnew;
    rn = rn_new;
  }
  return rn;
}

}  // namespace

QesSolution solve_harmonic(double f0, double p, int m) {
  if (!(f0 > 0.0)) throw std::domain_error("solve_harmonic: f_0 must be positive");
  if (m < 0) throw std::invalid_argument("solve_harmonic: m must be non-negative");

  QesSolution sol;
  sol.energy = f0 * (4.0 * m + 2.0 * p + 1.0);
  sol.wave.h.assign(m + 1, 0.0);
  sol.wave.h[m] = 1.0;
  // Row n of the bidiagonal system: 4 f_0 (m-n) h_n + C_n h_{n+1} = 0.
  for (int n = m - 1; n >= 0; --n)
    sol.wave.h[n] = -element_C(n, p) * sol.wave.h[n + 1] / (4.0 * f0 * (m - n));
  sol.classification = SolutionMethod::closed_form;

  WkbTail tail{0, {f0}};
  MagyariSystem sys = build_system(make_model(tail, m, ParityChannel{p}));
  sol.residual_norm = system_residual_norm(sys.H, sys.shifts, sol.plet, to_eigen(sol.wave.h));
  return sol;
}

SolutionSet solve_sextic(double f0, int N, double p) {
  if (N < 0) throw std::invalid_argument("solve_sextic: N must be non-negative");
  WkbTail tail{1, {f0, 1.0}};
  MagyariSystem sys = build_system(make_model(tail, N, ParityChannel{p}));

  // q = 1: the shift basis is the identity, so (H - g_0 I) h = 0 is a
  // classical eigenproblem for the (N+1) x (N+1) tridiagonal H.
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.H);
  SolutionSet out;
  int complex_count = 0;
  for (int i = 0; i <= N; ++i) {
    const std::complex<double> ev = es.eigenvalues()[i];
    const double scale = 1.0 + std::abs(ev.real());
    if (std::abs(ev.imag()) > 1e-9 * scale) {
      ++complex_count;
      continue;
    }
    Eigen::VectorXcd vec = es.eigenvectors().col(i);
    if (std::abs(vec[N]) < 1e-12 * vec.cwiseAbs().maxCoeff()) {
      out.diagnostic += "eigenvector with vanishing h_N skipped; ";
      continue;
    }
    QesSolution sol;
    vec /= vec[N];
    // Polish the eigenpair with a few Newton steps: the dense eigensolver
    // delivers ~1e-12 relative accuracy, the refined root reaches the
    // rounding floor of the recurrence.
    Eigen::VectorXd x(N + 1);
    x[0] = ev.real();
    for (int n = 0; n < N; ++n) x[1 + n] = vec[n].real();
    const double h_scale = 1.0 + (sys.H.size() ? sys.H.cwiseAbs().maxCoeff() : 0.0);
    sol.residual_norm = newton_iterate(sys.H, sys.shifts, x, 40, 1e-17 * h_scale);
    sol.plet.g = {x[0]};
    sol.energy = -x[0];
    sol.wave.h.resize(N + 1);
    for (int n = 0; n < N; ++n) sol.wave.h[n] = x[1 + n];
    sol.wave.h[N] = 1.0;
    sol.classification = SolutionMethod::closed_form;
    out.solutions.push_back(std::move(sol));
  }
  if (complex_count > 0)
    out.diagnostic += std::to_string(complex_count) + " complex eigenvalues dropped";
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const QesSolution& a, const QesSolution& b) { return a.plet.g[0] < b.plet.g[0]; });
  return out;
}

QesSolution solve_n0(const WkbTail& tail, double p) {
  tail.validate();
  const int q = tail.q;
  QesSolution sol;
  sol.wave.h = {1.0};
  sol.plet.g.resize(q);
  // Row k of the N = 0 system forces g_k = sum_{j<k} f_j f_{k-1-j} - f_k (2k+2p+1).
  for (int k = 0; k < q; ++k) {
    double cross = 0.0;
    for (int j = 0; j <= k - 1; ++j) cross += tail.f[j] * tail.f[k - 1 - j];
    sol.plet.g[k] = cross - tail.f[k] * (2.0 * k + 2.0 * p + 1.0);
  }
  sol.energy = sol.plet.energy();
  if (q == 0) sol.energy = tail.f[0] * (2.0 * p + 1.0);
  sol.classification = SolutionMethod::closed_form;

  MagyariSystem sys = build_system(make_model(tail, 0, ParityChannel{p}));
  sol.residual_norm = system_residual_norm(sys.H, sys.shifts, sol.plet, to_eigen(sol.wave.h));
  return sol;
}

SolutionSet solve_newton(const Eigen::MatrixXd& H, const ShiftBasis& shifts,
                         const NewtonOptions& options) {
  const int q = shifts.q;
  const int N = shifts.N;
  if (H.rows() != N + q || H.cols() != N + 1)
    throw std::invalid_argument("solve_newton: matrix shape mismatch");
  if (options.starts < 1) throw std::invalid_argument("solve_newton: starts must be >= 1");

  const int dim = N + q;
  const double h_max = H.size() ? H.cwiseAbs().maxCoeff() : 0.0;
  // Gershgorin-type default start box: the plet components of any root are
  // bounded by the largest absolute row sum of H.
  const double row_sum = H.size() ? H.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  const double R = options.radius > 0.0 ? options.radius : 1.0 + row_sum;
  // Tolerances scale with the matrix magnitude; the large-ell systems carry
  // entries of order p.
  const double scale = 1.0 + h_max;
  const double conv_tol = options.residual_tol * scale;
  const double accept_tol = options.accept_tol * scale;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> box(-R, R);

  SolutionSet out;
  int converged_count = 0;
  for (int s = 0; s < options.starts; ++s) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = box(rng);
    const double rn = newton_iterate(H, shifts, x, options.max_iterations, 1e-16 * scale);
    const bool converged = (rn < conv_tol);
    if (!converged || rn > accept_tol) continue;
    ++converged_count;

    QesSolution sol;
    sol.plet.g.assign(x.data(), x.data() + q);
    sol.wave.h.resize(N + 1);
    for (int i = 0; i < N; ++i) sol.wave.h[i] = x[q + i];
    sol.wave.h[N] = 1.0;
    sol.energy = q > 0 ? sol.plet.energy() : 0.0;
    sol.residual_norm = rn;
    sol.classification = SolutionMethod::newton;
    {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(system_jacobian(H, shifts, x));
      lu.setThreshold(1e-10);
      sol.singular_jacobian = (lu.rank() < dim);
    }

    // Dedup at 1e-8 distance, keeping the smaller residual.
    bool merged = false;
    for (QesSolution& existing : out.solutions) {
      const double dist =
          dim ? (pack(existing) - pack(sol)).cwiseAbs().maxCoeff() : 0.0;
      if (dist < options.dedup_tol) {
        if (sol.residual_norm < existing.residual_norm) existing = sol;
        merged = true;
        break;
      }
    }
    if (!merged) out.solutions.push_back(std::move(sol));
  }

  if (converged_count == 0 && dim > 0)
    out.diagnostic = "no Newton start converged (" + std::to_string(options.starts) + " starts)";
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const QesSolution& a, const QesSolution& b) {
              const Eigen::VectorXd xa = pack(a), xb = pack(b);
              for (int i = 0; i < xa.size(); ++i)
                if (xa[i] != xb[i]) return xa[i] < xb[i];
              return false;
            });
  return out;
}

SolutionSet solve_newton(const MagyariSystem& system, const NewtonOptions& options) {
  SolutionSet out = solve_newton(system.H, system.shifts, options);
  if (system.model.q() == 0)
    for (QesSolution& s : out.solutions) s.energy = -system.model.g_q;
  return out;
}

}  // namespace qes
