#pragma once

#include "qes/types.hpp"

namespace qes {

// Coefficient matching [P'(x)]^2 = g_{q+1} x^{2q+2} + ... + g_{2q+1} x^{4q+2}
// solved downward from f_q = +sqrt(g_{2q+1}).  Only the dominant couplings
// g_{q+1}..g_{2q+1} of the spec are consumed.
WkbTail solve_wkb_tail(const PotentialSpec& spec);

// Inverse convolution: g_{s+1} = sum_{j+k=s} f_j f_k for s = q..2q.
// Returns (g_{q+1}, ..., g_{2q+1}).
std::vector<double> tail_to_dominant(const WkbTail& tail);

// The truncation-compatible intermediate coupling
//   g_q = -f_q (4N + 2q + 2p + 1) + (f_0 f_{q-1} + ... + f_{q-1} f_0).
// For q = 0 this is the harmonic convention g_0 = -f_0 (4N + 2p + 1).
double truncation_coupling(const WkbTail& tail, int N, const ParityChannel& channel);

// Assemble a model; fills g_q from the truncation condition.
QuasiExactModel make_model(const WkbTail& tail, int N, const ParityChannel& channel);

// P(x) = sum_k f_k x^{2k+2}/(2k+2).
double exponent_value(const WkbTail& tail, double x);

// psi(x) = exp(-P(x)) * sum_n h_n x^{2n+p}, truncated at n = N.
double evaluate_wavefunction(const QuasiExactModel& model, const WaveVector& h, double x);

}  // namespace qes
