#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

// Thrown when a zero-order state does not admit the q independent
// reduction rows (or the derived linear systems are singular).
class degeneracy_error : public std::runtime_error {
public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Parity / angular channel.  Physical bound states have p = 0 or 1;
// large-ell expansions extend p to large positive reals (ell = p - 1).
struct ParityChannel {
  double p = 0.0;

  double ell() const { return p - 1.0; }
  bool physical() const { return p == 0.0 || p == 1.0; }
};

// Coefficients f_0..f_q of the polynomial exponent
//   P(x) = sum_k f_k x^{2k+2} / (2k+2),
// with f_q > 0 required for normalizability.
struct WkbTail {
  int q = 0;
  std::vector<double> f;  // size q+1

  void validate() const {
    if (static_cast<int>(f.size()) != q + 1)
      throw std::invalid_argument("WkbTail: expected q+1 coefficients");
    if (!(f[q] > 0.0))
      throw std::domain_error("WkbTail: leading coefficient f_q must be positive");
  }
};

// Full coupling list g_1..g_{2q+1} of the polynomial well
//   V(x) = g_1 x^2 + g_2 x^4 + ... + g_{2q+1} x^{4q+2}.
struct PotentialSpec {
  int q = 0;
  std::vector<double> couplings;  // g_1..g_{2q+1}, size 2q+1

  double g(int m) const { return couplings.at(m - 1); }

  void validate() const {
    if (static_cast<int>(couplings.size()) != 2 * q + 1)
      throw std::invalid_argument("PotentialSpec: expected 2q+1 couplings");
    if (!(couplings.back() > 0.0))
      throw std::domain_error("PotentialSpec: leading coupling g_{2q+1} must be positive");
  }
};

// A potential tail together with the truncation degree N and channel.
// The intermediate coupling g_q is fixed by the truncation condition.
struct QuasiExactModel {
  WkbTail tail;
  int N = 0;
  ParityChannel channel;
  double g_q = 0.0;

  int q() const { return tail.q; }
};

// Generalized eigenvalue q-plet (g_0, ..., g_{q-1}); the energy is -g_0.
struct EigenPlet {
  std::vector<double> g;

  int q() const { return static_cast<int>(g.size()); }
  double energy() const { return g.empty() ? 0.0 : -g[0]; }
};

// Taylor coefficients h_0..h_N of the wave-function polynomial,
// normalized so that h_N = 1.
struct WaveVector {
  std::vector<double> h;

  int N() const { return static_cast<int>(h.size()) - 1; }

  // Rescale to the h_N = 1 normalization.
  void normalize() {
    if (h.empty() || h.back() == 0.0)
      throw std::domain_error("WaveVector: cannot normalize, h_N = 0");
    const double s = h.back();
    for (double& v : h) v /= s;
    h.back() = 1.0;
  }
};

}  // namespace qes
