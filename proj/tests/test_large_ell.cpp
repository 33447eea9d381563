#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qes/large_ell.hpp"
#include "qes/oscillator.hpp"

using namespace qes;

namespace {

MagyariSystem decadic_system(double f0, double f1, double p) {
  return build_system(make_model(WkbTail{2, {f0, f1, 1.0}}, 2, ParityChannel{p}));
}

}  // namespace

TEST_CASE("linear split reassembles the physical matrix exactly") {
  for (double p : {5.0, 50.0, 500.0}) {
    for (double c : {0.0, 1.0, -3.0}) {
      MagyariSystem sys = decadic_system(0.4, -0.9, p);
      LargePExpansion ex = split_linear_p(sys, p, c);
      CHECK(ex.sigma == doctest::Approx(1.0 / (2.0 * p + c)));
      Eigen::MatrixXd back = (2.0 * p + c) * ex.stack.assemble(ex.sigma);
      CHECK((back - sys.H).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + sys.H.cwiseAbs().maxCoeff()));
    }
  }
  // also for a q=1 system
  MagyariSystem sys = build_system(make_model(WkbTail{1, {0.3, 1.0}}, 3, ParityChannel{7.0}));
  LargePExpansion ex = split_linear_p(sys, 7.0);
  Eigen::MatrixXd back = 14.0 * ex.stack.assemble(1.0 / 14.0);
  CHECK((back - sys.H).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + sys.H.cwiseAbs().maxCoeff()));
}

TEST_CASE("linear split maps physical roots to scaled roots exactly") {
  const double p = 50.0;
  MagyariSystem sys = decadic_system(0.4, -0.9, p);
  LargePExpansion ex = split_linear_p(sys, p, 1.0);

  NewtonOptions options;
  options.starts = 96;
  options.seed = 2;
  SolutionSet roots = solve_newton(sys, options);
  REQUIRE(!roots.solutions.empty());

  const Eigen::MatrixXd assembled = ex.stack.assemble(ex.sigma);
  for (const QesSolution& s : roots.solutions) {
    EigenPlet scaled = scale_plet(ex, s.plet);
    const Eigen::VectorXd r =
        (assembled - ex.stack.shifts.shift(scaled)) * to_eigen(s.wave.h);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10 * (1.0 + assembled.cwiseAbs().maxCoeff()));
    // round trip through recover_physical
    auto [plet_back, wave_back] = recover_physical(ex, scaled, s.wave);
    for (int k = 0; k < 2; ++k)
      CHECK(plet_back.g[k] == doctest::Approx(s.plet.g[k]).epsilon(1e-12));
    for (int n = 0; n <= 2; ++n)
      CHECK(wave_back.h[n] == doctest::Approx(s.wave.h[n]).epsilon(1e-12));
  }
}

TEST_CASE("decadic rescale: stack entries and validation") {
  const double f0 = 0.37, f1 = -1.21, p = 100.0;
  LargePExpansion ex = rescale_decadic(f0, f1, p);
  CHECK(ex.sigma == doctest::Approx(std::pow(p, -1.0 / 3.0)));

  const Eigen::MatrixXd& H0 = ex.stack.H_stack[0];
  CHECK(H0(0, 1) == 1.0);
  CHECK(H0(1, 2) == 2.0);
  CHECK(H0(2, 0) == 2.0);
  CHECK(H0(3, 1) == 1.0);
  CHECK(H0.cwiseAbs().sum() == 6.0);

  const Eigen::MatrixXd& H1 = ex.stack.H_stack[1];
  CHECK(H1(1, 0) == doctest::Approx(-3.0 * f1 / 4.0));
  CHECK(H1(2, 1) == doctest::Approx(-7.0 * f1 / 4.0));
  CHECK(H1(3, 2) == doctest::Approx(-11.0 * f1 / 4.0));

  const Eigen::MatrixXd& H2 = ex.stack.H_stack[2];
  CHECK(H2(0, 0) == doctest::Approx(-f0 / 4.0));
  CHECK(H2(1, 1) == doctest::Approx(-5.0 * f0 / 4.0));
  CHECK(H2(2, 2) == doctest::Approx(-9.0 * f0 / 4.0));

  const Eigen::MatrixXd& H3 = ex.stack.H_stack[3];
  CHECK(H3(0, 1) == doctest::Approx(0.5));
  CHECK(H3(1, 2) == doctest::Approx(3.0));

  CHECK_THROWS_AS(rescale_decadic(f0, f1, p, 1), std::invalid_argument);
  CHECK_THROWS_AS(rescale_decadic(f0, f1, 0.5), std::domain_error);
}

TEST_CASE("decadic rescale is an exact change of variables") {
  const double f0 = 0.37, f1 = -1.21, p = 30.0;
  LargePExpansion ex = rescale_decadic(f0, f1, p);
  MagyariSystem sys = decadic_system(f0, f1, p);

  NewtonOptions options;
  options.starts = 128;
  options.seed = 8;
  SolutionSet scaled_roots = solve_newton(ex.stack.assemble(ex.sigma), ex.stack.shifts, options);
  SolutionSet physical_roots = solve_newton(sys, options);
  REQUIRE(!scaled_roots.solutions.empty());
  REQUIRE(!physical_roots.solutions.empty());
  CHECK(scaled_roots.solutions.size() == physical_roots.solutions.size());

  // every recovered scaled root is a physical root (small physical residual
  // and close to a Newton root of the physical system)
  for (const QesSolution& s : scaled_roots.solutions) {
    auto [plet, wave] = recover_physical(ex, s.plet, s.wave);
    const Eigen::VectorXd r = residual(sys, plet, wave);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-7 * (1.0 + sys.H.cwiseAbs().maxCoeff()));
    double best = 1e18;
    for (const QesSolution& phys : physical_roots.solutions)
      best = std::min(best, std::abs(phys.plet.g[0] - plet.g[0]) +
                                std::abs(phys.plet.g[1] - plet.g[1]));
    CHECK(best < 1e-6 * (1.0 + std::abs(plet.g[0]) + std::abs(plet.g[1])));
  }

  // and the forward plet map lands on scaled roots
  for (const QesSolution& phys : physical_roots.solutions) {
    EigenPlet st = scale_plet(ex, phys.plet);
    double best = 1e18;
    for (const QesSolution& s : scaled_roots.solutions)
      best = std::min(best,
                      std::abs(s.plet.g[0] - st.g[0]) + std::abs(s.plet.g[1] - st.g[1]));
    CHECK(best < 1e-7);
  }
}

TEST_CASE("decadic perturbation series approaches the scaled Newton root") {
  const double f0 = 0.37, f1 = -1.21, p = 1000.0;
  LargePExpansion ex = rescale_decadic(f0, f1, p);
  std::vector<ZeroOrderSolution> states = solve_zero_order(ex.stack, 96, 13);
  REQUIRE(states.size() >= 2);

  NewtonOptions options;
  options.starts = 128;
  options.seed = 4;
  SolutionSet roots = solve_newton(ex.stack.assemble(ex.sigma), ex.stack.shifts, options);

  for (const ZeroOrderSolution& z : states) {
    CorrectionSeries series = run(ex.stack, z, 4);
    auto [plet, wave] = evaluate_series(series, z, ex.sigma);
    double best = 1e18;
    for (const QesSolution& s : roots.solutions)
      best = std::min(best, std::abs(s.plet.g[0] - plet.g[0]) +
                                std::abs(s.plet.g[1] - plet.g[1]));
    CHECK(best < 1e-3);  // sigma^5 = 1e-5 with modest constants
    (void)wave;
  }
}

TEST_CASE("split_linear_p validates its inputs") {
  MagyariSystem sys = decadic_system(0.1, 0.2, 3.0);
  CHECK_THROWS_AS(split_linear_p(sys, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(split_linear_p(sys, 3.0, -6.0), std::domain_error);
}
