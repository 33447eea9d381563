#include "qes/oscillator.hpp"

namespace qes {

WkbTail solve_wkb_tail(const PotentialSpec& spec) {
  spec.validate();
  const int q = spec.q;
  WkbTail tail;
  tail.q = q;
  tail.f.assign(q + 1, 0.0);
  tail.f[q] = std::sqrt(spec.g(2 * q + 1));
  for (int m = 1; m <= q; ++m) {
    // g_{2q+1-m} = 2 f_q f_{q-m} + sum_{j=1}^{m-1} f_{q-j} f_{q-m+j}
    double cross = 0.0;
    for (int j = 1; j <= m - 1; ++j) cross += tail.f[q - j] * tail.f[q - m + j];
    tail.f[q - m] = (spec.g(2 * q + 1 - m) - cross) / (2.0 * tail.f[q]);
  }
  return tail;
}

std::vector<double> tail_to_dominant(const WkbTail& tail) {
  tail.validate();
  const int q = tail.q;
  std::vector<double> g(q + 1, 0.0);  // g_{q+1}..g_{2q+1}
  for (int s = q; s <= 2 * q; ++s) {
    double sum = 0.0;
    for (int j = 0; j <= q; ++j) {
      const int k = s - j;
      if (k >= 0 && k <= q) sum += tail.f[j] * tail.f[k];
    }
    g[s - q] = sum;
  }
  return g;
}

double truncation_coupling(const WkbTail& tail, int N, const ParityChannel& channel) {
  tail.validate();
  if (N < 0) throw std::invalid_argument("truncation_coupling: N must be non-negative");
  const int q = tail.q;
  double cross = 0.0;
  for (int j = 0; j <= q - 1; ++j) cross += tail.f[j] * tail.f[q - 1 - j];
  return -tail.f[q] * (4.0 * N + 2.0 * q + 2.0 * channel.p + 1.0) + cross;
}

QuasiExactModel make_model(const WkbTail& tail, int N, const ParityChannel& channel) {
  QuasiExactModel model;
  model.tail = tail;
  model.N = N;
  model.channel = channel;
  model.g_q = truncation_coupling(tail, N, channel);
  return model;
}

double exponent_value(const WkbTail& tail, double x) {
  const double x2 = x * x;
  double val = 0.0;
  double pw = x2;  // x^{2k+2}
  for (int k = 0; k <= tail.q; ++k) {
    val += tail.f[k] * pw / (2.0 * k + 2.0);
    pw *= x2;
  }
  return val;
}

double evaluate_wavefunction(const QuasiExactModel& model, const WaveVector& h, double x) {
  if (h.N() != model.N)
    throw std::invalid_argument("evaluate_wavefunction: wave has wrong length");
  const double x2 = x * x;
  double poly = 0.0;
  for (int n = model.N; n >= 0; --n) poly = poly * x2 + h.h[n];
  poly *= std::pow(std::abs(x), model.channel.p) *
          ((x < 0.0 && model.channel.p == 1.0) ? -1.0 : 1.0);
  return std::exp(-exponent_value(model.tail, x)) * poly;
}

}  // namespace qes
