#include "qes/verify.hpp"

#include <cmath>
#include <limits>

#include "qes/oscillator.hpp"

namespace qes {

namespace {

// Full coupling list g_1..g_{2q+1} and energy implied by (model, plet).
void assemble_potential(const QuasiExactModel& model, const EigenPlet& plet,
                        std::vector<double>& g, double& E) {
  const int q = model.q();
  g.assign(2 * q + 1, 0.0);
  const std::vector<double> dominant = tail_to_dominant(model.tail);
  for (int m = q + 1; m <= 2 * q + 1; ++m) g[m - 1] = dominant[m - q - 1];
  if (q >= 1) {
    g[q - 1] = model.g_q;
    for (int k = 1; k <= q - 1; ++k) g[k - 1] = plet.g[k];
    E = -plet.g[0];
  } else {
    E = -model.g_q;  // q = 0: the truncation coupling is g_0 itself
  }
}

double potential_value(const std::vector<double>& g, double x) {
  const double x2 = x * x;
  double v = 0.0;
  for (int m = static_cast<int>(g.size()); m >= 1; --m) v = (v + g[m - 1]) * x2;
  return v;
}

}  // namespace

Eigen::VectorXd recurrence_residual(const QuasiExactModel& model, const EigenPlet& plet,
                                    const WaveVector& wave) {
  MagyariSystem system = build_system(model);
  const int q = model.q();
  const int rows = static_cast<int>(system.H.rows());
  const int cols = static_cast<int>(system.H.cols());
  // Accumulate in extended precision so the residual of a machine-accurate
  // solution is limited by the rounding of its entries, not by the summation.
  Eigen::VectorXd out(rows + 1);
  for (int n = 0; n < rows; ++n) {
    long double acc = 0.0L;
    for (int m = 0; m < cols; ++m)
      acc += static_cast<long double>(system.H(n, m)) * wave.h[m];
    for (int xi = 1; xi <= q; ++xi) {
      const int m = n - xi + 1;
      if (m >= 0 && m < cols)
        acc -= static_cast<long double>(plet.g[xi - 1]) * wave.h[m];
    }
    out[n] = static_cast<double>(acc);
  }
  // Virtual closing row: its only in-range coefficient is A_{N+q}^{(q)},
  // identically zero once g_q obeys the truncation condition.
  const double closing =
      element_band(model.tail, q, model.N + q, model.channel.p) - model.g_q;
  out[rows] = closing * wave.h.back();
  return out;
}

double ode_residual(const QuasiExactModel& model, const EigenPlet& plet,
                    const WaveVector& wave, std::span<const double> sample_points) {
  std::vector<double> g;
  double E = 0.0;
  assemble_potential(model, plet, g, E);
  const double p = model.channel.p;
  const double ell = p - 1.0;
  const WkbTail& tail = model.tail;

  // Extended-precision accumulation: the residual mixes large opposing terms
  // (psi'' against V psi), so double summation alone would dominate the
  // result for machine-accurate states.
  double worst = 0.0;
  for (double xd : sample_points) {
    const long double x = xd;
    // u and derivatives of the polynomial factor sum h_n x^{2n+p}
    long double u = 0.0L, du = 0.0L, ddu = 0.0L;
    for (int n = 0; n <= model.N; ++n) {
      const long double e = 2.0L * n + static_cast<long double>(p);
      const long double xp = std::pow(x, e);
      u += wave.h[n] * xp;
      du += wave.h[n] * e * xp / x;
      ddu += wave.h[n] * e * (e - 1.0L) * xp / (x * x);
    }
    long double dP = 0.0L, ddP = 0.0L, P = 0.0L;
    for (int k = 0; k <= tail.q; ++k) {
      const long double x2k = std::pow(x, 2.0L * k);
      dP += tail.f[k] * x2k * x;
      ddP += tail.f[k] * (2.0L * k + 1.0L) * x2k;
      P += tail.f[k] * x2k * x * x / (2.0L * k + 2.0L);
    }
    long double V = 0.0L;
    for (int m = static_cast<int>(g.size()); m >= 1; --m) V = (V + g[m - 1]) * (x * x);
    const long double expP = std::exp(-P);
    const long double psi = expP * u;
    const long double ddpsi = expP * (ddu - 2.0L * dP * du + (dP * dP - ddP) * u);
    const long double centrifugal = ell * (ell + 1.0L) / (x * x);
    const long double r = -ddpsi + (V + centrifugal - static_cast<long double>(E)) * psi;
    worst = std::max(
        worst, static_cast<double>(std::abs(r) / (1.0L + std::abs(E * psi))));
  }
  return worst;
}

std::vector<double> default_sample_points(const QuasiExactModel& model, const EigenPlet& plet) {
  std::vector<double> g;
  double E = 0.0;
  assemble_potential(model, plet, g, E);

  // Outermost turning point: last sign change of V - E on a coarse grid.
  double x_turn = 1.0;
  double prev = potential_value(g, 1e-3) - E;
  for (int i = 1; i <= 2000; ++i) {
    const double x = 20.0 * i / 2000.0;
    const double cur = potential_value(g, x) - E;
    if (prev * cur <= 0.0) x_turn = x;
    prev = cur;
  }

  const double a = 0.1, b = x_turn + 1.0;
  std::vector<double> pts(16);
  for (int i = 0; i < 16; ++i) {
    const double theta = M_PI * (i + 0.5) / 16.0;
    pts[i] = a + (b - a) * 0.5 * (1.0 - std::cos(theta));
  }
  return pts;
}

std::vector<ConvergenceRow> convergence_report(const PerturbationProblem& problem,
                                               const ZeroOrderSolution& z, int K_max,
                                               std::span<const double> sigmas, int starts,
                                               std::uint64_t seed) {
  const CorrectionSeries series =
      K_max >= 1 ? run(problem, z, K_max) : CorrectionSeries{};

  // Newton reference plets per sigma (empty -> that sigma is dropped).
  std::vector<std::vector<EigenPlet>> references;
  for (double sigma : sigmas) {
    NewtonOptions options;
    options.starts = starts;
    options.seed = seed;
    SolutionSet roots = solve_newton(problem.assemble(sigma), problem.shifts, options);
    std::vector<EigenPlet> plets;
    for (const QesSolution& s : roots.solutions) plets.push_back(s.plet);
    references.push_back(std::move(plets));
  }

  std::vector<ConvergenceRow> table;
  for (int K = 0; K <= K_max; ++K) {
    ConvergenceRow row;
    row.K = K;
    std::vector<double> log_sigma, log_error;
    for (size_t i = 0; i < sigmas.size(); ++i) {
      if (references[i].empty()) {
        row.errors.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      EigenPlet approx = z.plet0;
      double pw = 1.0;
      for (int k = 1; k <= K; ++k) {
        pw *= sigmas[i];
        for (int c = 0; c < approx.q(); ++c) approx.g[c] += pw * series.orders[k - 1].plet.g[c];
      }
      double best = std::numeric_limits<double>::infinity();
      for (const EigenPlet& ref : references[i]) {
        double err = 0.0;
        for (int c = 0; c < approx.q(); ++c) err = std::max(err, std::abs(approx.g[c] - ref.g[c]));
        best = std::min(best, err);
      }
      row.errors.push_back(best);
      if (best > 0.0) {
        log_sigma.push_back(std::log(sigmas[i]));
        log_error.push_back(std::log(best));
      }
    }
    // Least-squares slope of log error vs log sigma.
    const size_t n = log_sigma.size();
    if (n >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < n; ++i) {
        sx += log_sigma[i];
        sy += log_error[i];
        sxx += log_sigma[i] * log_sigma[i];
        sxy += log_sigma[i] * log_error[i];
      }
      row.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace qes
