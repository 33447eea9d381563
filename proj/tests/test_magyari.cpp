#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qes/magyari.hpp"
#include "qes/oscillator.hpp"

using namespace qes;

namespace {

MagyariSystem toy_system(double f0, double f1, double p) {
  return build_system(make_model(WkbTail{2, {f0, f1, 1.0}}, 2, ParityChannel{p}));
}

}  // namespace

TEST_CASE("shift basis structure") {
  for (int q = 1; q <= 4; ++q) {
    for (int N : {0, 1, 2, 5}) {
      ShiftBasis basis = make_shift_basis(q, N);
      for (int xi = 1; xi <= q; ++xi) {
        const Eigen::MatrixXd& J = basis.J[xi - 1];
        CHECK(J.sum() == doctest::Approx(N + 1));
        // exactly one unit row per column, at n = m + xi - 1
        for (int m = 0; m <= N; ++m) {
          for (int n = 0; n < N + q; ++n)
            CHECK(J(n, m) == (n == m + xi - 1 ? 1.0 : 0.0));
        }
      }
      // transpose products vanish for far-apart diagonals
      for (int j = 1; j <= q; ++j)
        for (int xi = 1; xi <= q; ++xi)
          if (std::abs(j - xi) >= N + 1)
            CHECK((basis.J[j - 1].transpose() * basis.J[xi - 1]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("toy decadic matrix entries") {
  const double f0 = 0.37, f1 = -1.21, p = 1.0;
  MagyariSystem sys = toy_system(f0, f1, p);
  REQUIRE(sys.H.rows() == 4);
  REQUIRE(sys.H.cols() == 3);

  // g-free part of the printed 4x3 system
  CHECK(sys.H(0, 0) == doctest::Approx(-f0 - 2 * p * f0));
  CHECK(sys.H(0, 1) == doctest::Approx(2 + 4 * p));
  CHECK(sys.H(1, 0) == doctest::Approx(f0 * f0 - 3 * f1 - 2 * p * f1));
  CHECK(sys.H(1, 1) == doctest::Approx(-5 * f0 - 2 * p * f0));
  CHECK(sys.H(1, 2) == doctest::Approx(12 + 8 * p));
  CHECK(sys.H(2, 0) == doctest::Approx(8.0));
  CHECK(sys.H(2, 1) == doctest::Approx(f0 * f0 - 7 * f1 - 2 * p * f1));
  CHECK(sys.H(2, 2) == doctest::Approx(-9 * f0 - 2 * p * f0));
  CHECK(sys.H(3, 0) == doctest::Approx(0.0));
  CHECK(sys.H(3, 1) == doctest::Approx(4.0));
  CHECK(sys.H(3, 2) == doctest::Approx(f0 * f0 - 11 * f1 - 2 * p * f1));
}

TEST_CASE("band structure and lowest band linearity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const int q = 1 + trial % 4;
    const int N = trial % 5;
    WkbTail tail{q, {}};
    tail.f.resize(q + 1);
    for (double& f : tail.f) f = coef(rng);
    tail.f[q] = std::abs(tail.f[q]) + 0.3;
    MagyariSystem sys = build_system(make_model(tail, N, ParityChannel{double(trial % 2)}));

    for (int n = 0; n < N + q; ++n)
      for (int m = 0; m <= N; ++m)
        if (n - m < -1 || n - m > q) CHECK(sys.H(n, m) == 0.0);

    for (int n = 0; n < N + q; ++n) {
      const int m = n - q;
      if (m >= 0 && m <= N)
        CHECK(sys.H(n, m) == doctest::Approx(4.0 * tail.f[q] * (N + q - n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("q=0 gives the bidiagonal harmonic structure") {
  MagyariSystem sys = build_system(make_model(WkbTail{0, {1.0}}, 3, ParityChannel{0.0}));
  REQUIRE(sys.H.rows() == 3);
  REQUIRE(sys.H.cols() == 4);
  for (int n = 0; n < 3; ++n) {
    CHECK(sys.H(n, n) == doctest::Approx(4.0 * (3 - n)));  // 4 f_0 (N - n)
    CHECK(sys.H(n, n + 1) == doctest::Approx(element_C(n, 0.0)));
  }
}

TEST_CASE("apply subtracts the shift sum and is affine in the plet") {
  MagyariSystem sys = toy_system(0.5, -0.25, 0.0);
  SUBCASE("zero plet returns H") {
    CHECK((apply(sys, EigenPlet{{0.0, 0.0}}) - sys.H).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("printed toy with the shifts in place") {
    const double g0 = 1.7, g1 = -0.4;
    Eigen::MatrixXd M = apply(sys, EigenPlet{{g0, g1}});
    CHECK(M(0, 0) == doctest::Approx(sys.H(0, 0) - g0));
    CHECK(M(1, 0) == doctest::Approx(sys.H(1, 0) - g1));
    CHECK(M(2, 1) == doctest::Approx(sys.H(2, 1) - g1));
    CHECK(M(3, 2) == doctest::Approx(sys.H(3, 2) - g1));
    CHECK(M(2, 0) == doctest::Approx(sys.H(2, 0)));
  }
  SUBCASE("affinity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      EigenPlet a{{coef(rng), coef(rng)}};
      EigenPlet b{{coef(rng), coef(rng)}};
      EigenPlet ab{{a.g[0] + b.g[0], a.g[1] + b.g[1]}};
      Eigen::MatrixXd lhs = apply(sys, ab) - apply(sys, a) - apply(sys, b) +
                            apply(sys, EigenPlet{{0.0, 0.0}});
      CHECK(lhs.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("plet length mismatch rejected") {
    CHECK_THROWS_AS(apply(sys, EigenPlet{{1.0}}), std::invalid_argument);
  }
}

TEST_CASE("residual of the unit-coordinate wave is the last column") {
  MagyariSystem sys = toy_system(-0.3, 0.9, 1.0);
  EigenPlet plet{{0.2, -1.1}};
  WaveVector wave{{0.0, 0.0, 1.0}};
  Eigen::VectorXd r = residual(sys, plet, wave);
  Eigen::MatrixXd M = apply(sys, plet);
  CHECK((r - M.col(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("virtual closing row vanishes analytically") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int q = trial % 5;
    const int N = trial % 4;
    WkbTail tail{q, {}};
    tail.f.resize(q + 1);
    for (double& f : tail.f) f = coef(rng);
    tail.f[q] = std::abs(tail.f[q]) + 0.4;
    QuasiExactModel model = make_model(tail, N, ParityChannel{double(trial % 2)});
    const double closing = element_band(tail, q, N + q, model.channel.p) - model.g_q;
    CHECK(std::abs(closing) < 1e-12);
  }
}
