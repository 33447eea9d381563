#include "qes/perturb.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <sstream>

namespace qes {

namespace {

constexpr double kNullThreshold = 1e-10;   // relative SVD cutoff
constexpr double kRankRatio = 1e-8;        // smallest/largest singular value

std::string plet_to_string(const EigenPlet& plet) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < plet.q(); ++i) os << (i ? ", " : "") << plet.g[i];
  os << ")";
  return os.str();
}

double smallest_singular_ratio(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  if (smax == 0.0) return 0.0;
  return sv[sv.size() - 1] / smax;
}

// Deterministic sign/scale convention: max-abs entry 1, first nonzero positive.
void canonicalize(Eigen::VectorXd& v) {
  double amax = v.cwiseAbs().maxCoeff();
  if (amax == 0.0) return;
  v /= amax;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
}

// Try to combine the null-basis rows into a single row supported on the
// given index subset.  Returns false when no such combination exists.
bool candidate_from_support(const Eigen::MatrixXd& basis, const std::vector<int>& support,
                            int window_offset, ReductionPair& out) {
  const int d = static_cast<int>(basis.rows());
  const int total = static_cast<int>(basis.cols());
  std::vector<bool> in_support(total, false);
  for (int i : support) in_support[i] = true;

  std::vector<int> holes;
  for (int i = 0; i < total; ++i)
    if (!in_support[i]) holes.push_back(i);

  Eigen::MatrixXd C(static_cast<int>(holes.size()), d);
  for (int r = 0; r < C.rows(); ++r) C.row(r) = basis.col(holes[r]).transpose();

  Eigen::VectorXd coeff;
  if (C.rows() == 0) {
    coeff = Eigen::VectorXd::Zero(d);
    coeff[0] = 1.0;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const int rank_bound = std::min<int>(C.rows(), d);
    int rank = 0;
    for (int i = 0; i < rank_bound; ++i)
      if (sv[i] > kNullThreshold * std::max(smax, 1.0)) ++rank;
    if (rank >= d) return false;
    coeff = svd.matrixV().col(d - 1);  // deterministic pick within the null space
  }

  Eigen::VectorXd row = basis.transpose() * coeff;
  if (row.cwiseAbs().maxCoeff() < 1e-12) return false;

  out.support = support;
  out.window_offset = window_offset;
  out.rho.resize(static_cast<int>(support.size()));
  for (size_t m = 0; m < support.size(); ++m) out.rho[static_cast<int>(m)] = row[support[m]];
  canonicalize(out.rho);
  return true;
}

Eigen::MatrixXd expanded_rows(const std::vector<ReductionPair>& pairs, int total) {
  Eigen::MatrixXd rows(static_cast<int>(pairs.size()), total);
  for (size_t i = 0; i < pairs.size(); ++i)
    rows.row(static_cast<int>(i)) = pairs[i].expanded(total).transpose();
  return rows;
}

// Gram-Schmidt completion: orthonormalize coordinate seeds against the
// fixed rows, collecting `count` new orthonormal rows, in index order.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& fixed, int dim, int count) {
  std::vector<Eigen::VectorXd> ortho;
  for (int r = 0; r < fixed.rows(); ++r) {
    Eigen::VectorXd v = fixed.row(r).transpose();
    for (const auto& u : ortho) v -= u.dot(v) * u;
    const double n = v.norm();
    if (n > 1e-12) ortho.push_back(v / n);
  }
  const size_t base = ortho.size();
  Eigen::MatrixXd out(count, dim);
  int got = 0;
  for (int i = 0; i < dim && got < count; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, i);
    for (const auto& u : ortho) v -= u.dot(v) * u;
    const double n = v.norm();
    if (n > 1e-10) {
      v /= n;
      ortho.push_back(v);
      out.row(got++) = v.transpose();
    }
  }
  if (got < count)
    throw degeneracy_error("orthogonal complement construction ran out of directions");
  (void)base;
  return out;
}

}  // namespace

Eigen::MatrixXd PerturbationProblem::assemble(double lambda) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N + q, N + 1);
  double pw = 1.0;
  for (const auto& Hk : H_stack) {
    H += pw * Hk;
    pw *= lambda;
  }
  return H;
}

PerturbationProblem make_problem(int q, int N, std::vector<Eigen::MatrixXd> stack) {
  PerturbationProblem problem;
  problem.q = q;
  problem.N = N;
  for (const auto& Hk : stack)
    if (Hk.rows() != N + q || Hk.cols() != N + 1)
      throw std::invalid_argument("make_problem: stack shape mismatch");
  problem.H_stack = std::move(stack);
  problem.shifts = make_shift_basis(q, N);
  return problem;
}

Eigen::VectorXd ReductionPair::expanded(int rows) const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(rows);
  for (size_t m = 0; m < support.size(); ++m) row[support[m]] = rho[static_cast<int>(m)];
  return row;
}

Eigen::VectorXd ReductionPair::project(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(static_cast<int>(support.size()));
  for (size_t m = 0; m < support.size(); ++m) out[static_cast<int>(m)] = v[support[m]];
  return out;
}

Eigen::MatrixXd left_null_basis(const Eigen::MatrixXd& M0, int q) {
  const int rows = static_cast<int>(M0.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M0, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > kNullThreshold * std::max(smax, 1.0)) ++rank;
  const int null_dim = rows - rank;
  if (null_dim < q)
    throw degeneracy_error("left null space dimension " + std::to_string(null_dim) +
                           " below q = " + std::to_string(q));
  Eigen::MatrixXd basis(null_dim, rows);
  for (int i = 0; i < null_dim; ++i) basis.row(i) = svd.matrixU().col(rank + i).transpose();
  return basis;
}

std::vector<ReductionPair> reduce_left_vectors(const Eigen::MatrixXd& basis, int q, int N) {
  const int total = N + q;
  if (basis.cols() != total)
    throw std::invalid_argument("reduce_left_vectors: basis width mismatch");

  auto window_support = [&](int offset) {
    std::vector<int> s(N + 1);
    for (int i = 0; i <= N; ++i) s[i] = offset + i;
    return s;
  };

  // Preferred route: window j-1 for the j-th pair.
  std::vector<ReductionPair> preferred;
  bool all_windows = true;
  for (int j = 1; j <= q; ++j) {
    ReductionPair pair;
    if (candidate_from_support(basis, window_support(j - 1), j - 1, pair))
      preferred.push_back(std::move(pair));
    else
      all_windows = false;
  }
  if (all_windows && static_cast<int>(preferred.size()) == q &&
      smallest_singular_ratio(expanded_rows(preferred, total)) > kRankRatio)
    return preferred;

  // Fallback: all windows plus every (N+1)-element index subset, chosen
  // greedily to maximize the smallest singular value of the expanded set.
  std::vector<ReductionPair> candidates = preferred;
  std::vector<int> subset(N + 1);
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + (N + 1), true);
  // Enumerate combinations via the mask permutation trick.
  std::sort(mask.begin(), mask.end(), std::greater<bool>());
  do {
    int idx = 0;
    int offset = -1;
    for (int i = 0; i < total; ++i)
      if (mask[i]) subset[idx++] = i;
    bool contiguous = (subset.back() - subset.front() == N);
    if (contiguous) offset = subset.front();
    ReductionPair pair;
    if (candidate_from_support(basis, subset, offset, pair)) candidates.push_back(std::move(pair));
  } while (std::prev_permutation(mask.begin(), mask.end()));

  std::vector<ReductionPair> chosen;
  for (int slot = 0; slot < q; ++slot) {
    double best = -1.0;
    int best_idx = -1;
    for (size_t c = 0; c < candidates.size(); ++c) {
      std::vector<ReductionPair> trial = chosen;
      trial.push_back(candidates[c]);
      const double ratio = smallest_singular_ratio(expanded_rows(trial, total));
      if (ratio > best + 1e-14) {
        best = ratio;
        best_idx = static_cast<int>(c);
      }
    }
    if (best_idx < 0 || best <= kRankRatio)
      throw degeneracy_error("no linearly independent q-plet of reduction pairs found");
    chosen.push_back(candidates[best_idx]);
  }
  return chosen;
}

std::vector<ZeroOrderSolution> solve_zero_order(const PerturbationProblem& problem,
                                                int starts, std::uint64_t seed) {
  NewtonOptions options;
  options.starts = starts;
  options.seed = seed;
  SolutionSet roots = solve_newton(problem.H0(), problem.shifts, options);

  std::vector<ZeroOrderSolution> out;
  for (const QesSolution& root : roots.solutions) {
    ZeroOrderSolution z;
    z.plet0 = root.plet;
    z.wave0 = root.wave;
    const Eigen::MatrixXd M0 = problem.H0() - problem.shifts.shift(z.plet0);
    z.left_basis = left_null_basis(M0, problem.q);
    z.reductions = reduce_left_vectors(z.left_basis, problem.q, problem.N);

    const Eigen::VectorXd h0 = to_eigen(z.wave0.h);
    z.F.resize(problem.q, problem.q);
    for (int j = 0; j < problem.q; ++j)
      for (int xi = 1; xi <= problem.q; ++xi)
        z.F(j, xi - 1) = z.reductions[j].rho.dot(
            z.reductions[j].project(problem.shifts.apply_shift(xi, h0)));
    z.F_lu.compute(z.F);
    if (!z.F_lu.isInvertible())
      throw degeneracy_error("singular coupling matrix F at zero-order state " +
                             plet_to_string(z.plet0));
    out.push_back(std::move(z));
  }
  return out;
}

ProjectorPair build_projectors(const ZeroOrderSolution& z, const Eigen::MatrixXd& M0) {
  const int total = static_cast<int>(M0.rows());       // N+q
  const int cols = static_cast<int>(M0.cols());        // N+1
  const int N = cols - 1;

  ProjectorPair pp;
  Eigen::MatrixXd wave_row(1, cols);
  wave_row.row(0) = to_eigen(z.wave0.h).transpose();
  pp.right_basis = orthogonal_complement(wave_row, cols, N);
  pp.left_basis_Q = orthogonal_complement(expanded_rows(z.reductions, total), total, N);

  pp.restricted = pp.left_basis_Q * M0 * pp.right_basis.transpose();
  if (N > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pp.restricted);
    const auto& sv = svd.singularValues();
    pp.condition = sv[N - 1] > 0.0 ? sv[0] / sv[N - 1] : std::numeric_limits<double>::infinity();
    if (!(pp.condition < 1e12))
      throw degeneracy_error("restricted zero-order operator numerically singular at state " +
                             plet_to_string(z.plet0));
    pp.lu.compute(pp.restricted);
  } else {
    pp.condition = 1.0;
  }
  return pp;
}

Eigen::VectorXd known_vector(const PerturbationProblem& problem, const CorrectionSeries& series,
                             const Eigen::VectorXd& wave0, int k) {
  if (k < 1) throw std::invalid_argument("known_vector: k must be >= 1");
  Eigen::VectorXd known = -problem.order(k) * wave0;
  for (int m = 1; m <= k - 1; ++m) {
    const CorrectionOrder& lower = series.orders.at(k - m - 1);
    const Eigen::VectorXd& w = lower.wave;
    const CorrectionOrder& mid = series.orders.at(m - 1);
    known += problem.shifts.shift(mid.plet) * w - problem.order(m) * w;
  }
  return known;
}

EigenPlet coupling_corrections(const ZeroOrderSolution& z, const Eigen::VectorXd& known,
                               const ShiftBasis& shifts) {
  (void)shifts;
  const int q = static_cast<int>(z.F.rows());
  Eigen::VectorXd c(q);
  for (int j = 0; j < q; ++j) c[j] = -z.reductions[j].rho.dot(z.reductions[j].project(known));
  EigenPlet plet;
  plet.g = from_eigen(z.F_lu.solve(c));
  return plet;
}

Eigen::VectorXd wave_correction(const ProjectorPair& pp, const Eigen::VectorXd& known,
                                const EigenPlet& plet_k, const Eigen::VectorXd& wave0,
                                const ShiftBasis& shifts) {
  const int cols = static_cast<int>(wave0.size());
  if (pp.right_basis.rows() == 0) return Eigen::VectorXd::Zero(cols);
  const Eigen::VectorXd rhs = known + shifts.shift(plet_k) * wave0;
  const Eigen::VectorXd y = pp.lu.solve(pp.left_basis_Q * rhs);
  Eigen::VectorXd w = pp.right_basis.transpose() * y;
  // Re-impose the gauge <wave0|w> = 0 explicitly: the orthonormal complement
  // rows carry rounding of order eps * |wave0|, which the large dynamic range
  // of the h_N = 1 normalization would otherwise amplify.
  const double nn = wave0.squaredNorm();
  if (nn > 0.0) w -= (wave0.dot(w) / nn) * wave0;
  return w;
}

Eigen::MatrixXd left_corrections(const ZeroOrderSolution& z, const ProjectorPair& pp,
                                 const PerturbationProblem& problem,
                                 const CorrectionSeries& series, int k) {
  if (k < 1 || k > series.K())
    throw std::invalid_argument("left_corrections: order k not yet available");
  const int q = problem.q;
  const int total = problem.N + q;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q, total);
  if (pp.right_basis.rows() == 0) return out;

  Eigen::PartialPivLU<Eigen::MatrixXd> luT(pp.restricted.transpose());
  for (int xi = 0; xi < q; ++xi) {
    // <known^(k-1)| = sum_{m=0}^{k-1} <_xi <m| [S^(k-m) - H^(k-m)]
    Eigen::RowVectorXd known = Eigen::RowVectorXd::Zero(problem.N + 1);
    for (int m = 0; m <= k - 1; ++m) {
      Eigen::RowVectorXd row;
      if (m == 0)
        row = z.reductions[xi].expanded(total).transpose();
      else
        row = series.left_orders.at(m - 1).row(xi);
      const EigenPlet& plet = series.orders.at(k - m - 1).plet;
      known += row * (problem.shifts.shift(plet) - problem.order(k - m));
    }
    // Solve row Q_L (H0-S0) Q_R = known Q_R with row = a^T Q_L.
    const Eigen::VectorXd b = pp.right_basis * known.transpose();
    const Eigen::VectorXd a = luT.solve(b);
    out.row(xi) = a.transpose() * pp.left_basis_Q;
  }
  return out;
}

CorrectionSeries run(const PerturbationProblem& problem, const ZeroOrderSolution& z, int K,
                     bool with_left) {
  if (K < 1) throw std::invalid_argument("run: K must be >= 1");
  const Eigen::MatrixXd M0 = problem.H0() - problem.shifts.shift(z.plet0);
  const ProjectorPair pp = build_projectors(z, M0);
  const Eigen::VectorXd wave0 = to_eigen(z.wave0.h);

  CorrectionSeries series;
  for (int k = 1; k <= K; ++k) {
    const Eigen::VectorXd known = known_vector(problem, series, wave0, k);
    CorrectionOrder order;
    order.plet = coupling_corrections(z, known, problem.shifts);
    order.wave = wave_correction(pp, known, order.plet, wave0, problem.shifts);
    series.orders.push_back(std::move(order));
    if (with_left)
      series.left_orders.push_back(left_corrections(z, pp, problem, series, k));
  }
  return series;
}

std::pair<EigenPlet, WaveVector> evaluate_series(const CorrectionSeries& series,
                                                 const ZeroOrderSolution& z, double lambda) {
  EigenPlet plet = z.plet0;
  Eigen::VectorXd wave = to_eigen(z.wave0.h);
  double pw = 1.0;
  for (const CorrectionOrder& order : series.orders) {
    pw *= lambda;
    for (int i = 0; i < plet.q(); ++i) plet.g[i] += pw * order.plet.g[i];
    wave += pw * order.wave;
  }
  WaveVector wv;
  wv.h = from_eigen(wave);
  wv.normalize();
  return {plet, wv};
}

}  // namespace qes
