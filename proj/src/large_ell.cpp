#include "qes/large_ell.hpp"

#include "qes/oscillator.hpp"

namespace qes {

LargePExpansion split_linear_p(const MagyariSystem& system, double p, double shift_c) {
  if (system.model.channel.p != p)
    throw std::invalid_argument("split_linear_p: p does not match the system's channel");
  const double denom = 2.0 * p + shift_c;
  if (denom == 0.0) throw std::domain_error("split_linear_p: 2p + c must be nonzero");

  // Every element of H is affine in p, so two rebuilds isolate the split.
  const QuasiExactModel& model = system.model;
  const Eigen::MatrixXd Hp0 = build_system(make_model(model.tail, model.N, ParityChannel{0.0})).H;
  const Eigen::MatrixXd Hp1 = build_system(make_model(model.tail, model.N, ParityChannel{1.0})).H;
  const Eigen::MatrixXd H_lin = Hp1 - Hp0;

  LargePExpansion out;
  out.scheme = ExpansionScheme::linear_split;
  out.p = p;
  out.shift_c = shift_c;
  out.sigma = 1.0 / denom;
  out.plet_scale = denom;
  out.stack = make_problem(model.q(), model.N,
                           {H_lin / 2.0, Hp0 - (shift_c / 2.0) * H_lin});
  return out;
}

LargePExpansion rescale_decadic(double f0, double f1, double p, int N) {
  if (N != 2) throw std::invalid_argument("rescale_decadic: only the N = 2 toy is implemented");
  if (!(p > 1.0)) throw std::domain_error("rescale_decadic: requires p > 1");

  LargePExpansion out;
  out.scheme = ExpansionScheme::decadic_rescale;
  out.p = p;
  out.sigma = std::pow(p, -1.0 / 3.0);
  out.f0 = f0;
  out.f1 = f1;

  Eigen::MatrixXd H0(4, 3), H1(4, 3), H2(4, 3), H3(4, 3);
  H0 << 0, 1, 0,
        0, 0, 2,
        2, 0, 0,
        0, 1, 0;
  H1 << 0, 0, 0,
        3, 0, 0,
        0, 7, 0,
        0, 0, 11;
  H1 *= -f1 / 4.0;
  H2 << 1, 0, 0,
        0, 5, 0,
        0, 0, 9,
        0, 0, 0;
  H2 *= -f0 / 4.0;
  H3 << 0, 1, 0,
        0, 0, 6,
        0, 0, 0,
        0, 0, 0;
  H3 *= 0.5;
  out.stack = make_problem(2, 2, {H0, H1, H2, H3});
  return out;
}

std::pair<EigenPlet, WaveVector> recover_physical(const LargePExpansion& expansion,
                                                  const EigenPlet& plet_scaled,
                                                  const WaveVector& wave_scaled) {
  EigenPlet plet;
  WaveVector wave = wave_scaled;
  switch (expansion.scheme) {
    case ExpansionScheme::linear_split: {
      plet = plet_scaled;
      for (double& g : plet.g) g *= expansion.plet_scale;
      break;
    }
    case ExpansionScheme::decadic_rescale: {
      const double sigma = expansion.sigma;
      const double p = expansion.p;
      const double s = plet_scaled.g.at(0);
      const double t = plet_scaled.g.at(1);
      const double Ebar = -2.0 * sigma * s;
      const double Fbar = -2.0 * sigma * sigma * t;
      plet.g = {-2.0 * p * (expansion.f0 + Ebar),
                expansion.f0 * expansion.f0 - 2.0 * p * expansion.f1 - 2.0 * p * Fbar};
      double pw = 1.0;
      for (double& h : wave.h) {
        h *= pw;
        pw *= sigma;
      }
      break;
    }
  }
  wave.normalize();
  return {plet, wave};
}

EigenPlet scale_plet(const LargePExpansion& expansion, const EigenPlet& plet_physical) {
  EigenPlet out;
  switch (expansion.scheme) {
    case ExpansionScheme::linear_split: {
      out = plet_physical;
      for (double& g : out.g) g /= expansion.plet_scale;
      break;
    }
    case ExpansionScheme::decadic_rescale: {
      const double sigma = expansion.sigma;
      const double p = expansion.p;
      const double g0 = plet_physical.g.at(0);
      const double g1 = plet_physical.g.at(1);
      const double Ebar = (-g0 - 2.0 * p * expansion.f0) / (2.0 * p);
      const double Fbar =
          (expansion.f0 * expansion.f0 - g1 - 2.0 * p * expansion.f1) / (2.0 * p);
      out.g = {-Ebar / (2.0 * sigma), -Fbar / (2.0 * sigma * sigma)};
      break;
    }
  }
  return out;
}

}  // namespace qes
