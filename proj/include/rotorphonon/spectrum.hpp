#pragma once
#include <vector>

#include <Eigen/Dense>

#include "rotorphonon/coupling.hpp"
#include "rotorphonon/eigensolve.hpp"

namespace rotorphonon {

// Product basis |n> (phonon Fock) x |l> (planar-rotor angular momentum),
// n in [0, n_max], l in [-l_max, l_max], ordered n-major then l ascending.
struct BasisTruncation {
  int n_max = 10;
  int l_max = 15;

  int dimension() const { return (n_max + 1) * (2 * l_max + 1); }
  int index(int n, int l) const { return n * (2 * l_max + 1) + (l + l_max); }
  bool contains(int n, int l) const {
    return n >= 0 && n <= n_max && l >= -l_max && l <= l_max;
  }
};

struct ProductLabel {
  int n = 0;
  int l = 0;
  bool operator==(const ProductLabel&) const = default;
};

// Uncoupled energy of |n, l> in h*Hz: nu (n + 1/2) + B l^2.
double bare_energy(ProductLabel s, double mode_nu, double B);

// Single-mode Hamiltonian in h*Hz. Diagonal: bare energies. Off-diagonal:
// +/- g_hz * sqrt(max(n, n')) between (n, l) and (n +/- 1, l +/- 1); cosine
// coupling gives the + sign. The sine form is written in the gauge
// |l> -> i^l |l>, which makes its matrix real (all couplings negative)
// without touching the spectrum. Templated so extended-precision studies can
// build the same matrix; row-major order.
template <class Scalar>
std::vector<Scalar> single_mode_matrix(double mode_nu, double B, double g_hz,
                                       CouplingForm form,
                                       const BasisTruncation& t) {
  const int dim = t.dimension();
  std::vector<Scalar> h(static_cast<size_t>(dim) * dim, Scalar(0));
  const Scalar sign = form == CouplingForm::cosine ? Scalar(1) : Scalar(-1);
  for (int n = 0; n <= t.n_max; ++n) {
    for (int l = -t.l_max; l <= t.l_max; ++l) {
      const int i = t.index(n, l);
      h[static_cast<size_t>(i) * dim + i] =
          Scalar(mode_nu) * (Scalar(n) + Scalar(0.5)) +
          Scalar(B) * Scalar(l) * Scalar(l);
      if (n == t.n_max) continue;
      using std::sqrt;
      const Scalar amp = sign * Scalar(g_hz) * sqrt(Scalar(n + 1));
      for (int dl : {-1, 1}) {
        if (l + dl < -t.l_max || l + dl > t.l_max) continue;
        const int j = t.index(n + 1, l + dl);
        h[static_cast<size_t>(i) * dim + j] = amp;
        h[static_cast<size_t>(j) * dim + i] = amp;
      }
    }
  }
  return h;
}

Eigen::MatrixXd build_single_mode_hamiltonian(double mode_nu, double B,
                                              double g_hz, CouplingForm form,
                                              const BasisTruncation& t);

struct DressedSpectrum {
  BasisTruncation trunc;
  std::vector<double> energies;       // ascending, h*Hz
  std::vector<ProductLabel> labels;   // dominant bare character per state
  std::vector<double> overlaps;       // squared overlap with that character
  bool strongly_mixed = false;        // some assigned overlap^2 < 0.5

  bool has(ProductLabel s) const;
  double energy(ProductLabel s) const;   // throws if s is not assigned
  double overlap(ProductLabel s) const;
};

// Exact diagonalization of the single-mode Hamiltonian with every dressed
// state labeled by its dominant bare product state. For l != 0 the bare
// references are the parity combinations (|l> +/- |-l>)/sqrt(2); the +l label
// names the symmetric one. Assignment is a greedy bijection by descending
// squared overlap, ties toward the lower bare index.
DressedSpectrum dressed_spectrum(double mode_nu, double B, double g_hz,
                                 CouplingForm form, const BasisTruncation& t);

// Second-order dipole-phonon energy shift of |n, l> from one mode, h*Hz.
// Terms whose denominator is smaller than eps_res_hz (and whose numerator is
// nonzero) raise resonance_error.
double pt_shift_mode(ProductLabel s, double mode_nu, double B, double g_hz,
                     double eps_res_hz = 1e3);

// Sum of per-mode second-order shifts for a joint state with phonon
// occupations `occupation[p]` in mode p and rotor quantum number l.
double pt_shift_total(const std::vector<int>& occupation, int l,
                      const std::vector<ModeCoupling>& couplings, double B,
                      double eps_res_hz = 1e3);

// Half-splittings of resonantly dressed manifolds, in Hz.
// Two-level case, l >= 1 and mode_nu = (2l+1) B: |g| sqrt(n).
// Three-level l = 0 case, mode_nu = B: |g| sqrt(2n), middle level unshifted.
// n = 0 has no resonant partner: domain error.
double resonant_splitting_two_level(int n, double g_hz);
double resonant_splitting_l0(int n, double g_hz);

enum class ShiftMethod { perturbative, exact };

// Shift of the mode's n = 0 -> 1 sideband at l = 0 caused by the rotor, Hz:
// [E(1,0) - E(0,0)] - mode_nu.
double sideband_shift(const ModeCoupling& c, double B, const BasisTruncation& t,
                      ShiftMethod method = ShiftMethod::perturbative);

// Doubles (n_max, l_max) until the energies of the target states move less
// than tol_hz under a further doubling; returns the first truncation that
// passed that test. Refuses to diagonalize past dim_cap.
BasisTruncation convergence_check(double mode_nu, double B, double g_hz,
                                  CouplingForm form, BasisTruncation start,
                                  const std::vector<ProductLabel>& targets,
                                  double tol_hz = 1e-3, int dim_cap = 20000);

}  // namespace rotorphonon
