#pragma once

#include "qes/perturb.hpp"

namespace qes {

enum class ExpansionScheme { linear_split, decadic_rescale };

// A perturbation stack derived from a physical system in the large-p regime,
// together with the maps that take scheme-level eigenplets and waves back to
// the physical (g_0, ..., h) variables.
struct LargePExpansion {
  ExpansionScheme scheme = ExpansionScheme::linear_split;
  double p = 0.0;
  double shift_c = 0.0;     // linear scheme: lambda = 1/(2p + shift_c)
  double sigma = 0.0;       // expansion parameter (lambda, or p^{-1/3})
  double plet_scale = 1.0;  // linear scheme: physical g = plet_scale * scaled g
  double f0 = 0.0;          // decadic scheme parameters
  double f1 = 0.0;
  PerturbationProblem stack;
};

// Exact split H = (2p + c) [H^(0) + lambda H^(1)], lambda = 1/(2p + c),
// valid for every (q, N) since each element of H is affine in p.
LargePExpansion split_linear_p(const MagyariSystem& system, double p, double shift_c = 0.0);

// The q = N = 2 rescaled decomposition: row scaling T, column scaling
// S = diag(1, sigma, sigma^2) with sigma = p^{-1/3}, eigenvalue map
// s = -Ebar/(2 sigma), t = -Fbar/(2 sigma^2).  Emits the four-matrix stack
// H^(0..3) with exact rational entries.
LargePExpansion rescale_decadic(double f0, double f1, double p, int N = 2);

// Invert the scheme maps: scaled (plet, wave) -> physical (plet, wave).
std::pair<EigenPlet, WaveVector> recover_physical(const LargePExpansion& expansion,
                                                  const EigenPlet& plet_scaled,
                                                  const WaveVector& wave_scaled);

// Forward map of a physical plet into scheme variables (used for round-trip
// and comparison checks).
EigenPlet scale_plet(const LargePExpansion& expansion, const EigenPlet& plet_physical);

}  // namespace qes
