#pragma once
#include <complex>
#include <vector>

#include "rotorphonon/crystal.hpp"

namespace rotorphonon {

// Which dipole component a mode drives: axial motion couples through cos(phi),
// radial motion through sin(phi).
enum class CouplingForm { cosine, sine };

const char* to_string(CouplingForm f);

struct RotorProperties {
  double mass = 0.0;  // kg
  double mu = 0.0;    // C m
  double B = 0.0;     // Hz (rotational constant as energy / h)
};

// Rotational constant of a uniform sphere, B = hbar^2 / (2 I) / h with
// I = (2/5) M r^2. Returns Hz.
double rotational_constant_sphere(double mass_kg, double radius_m);

// Zero-point electric field amplitude a mode presents at the rotor site:
// E0 = b_rot * sqrt(hbar * omega^3 * M_rot / (2 e^2)), in V/m. Signed with
// the rotor's eigenvector component; vanishes when the rotor sits on a node.
double field_scale(const NormalMode& mode, double rotor_mass, int rotor_index);

// Dipole coupling rate g = mu * E0 / (2 hbar), rad/s, signed like E0.
double coupling_rate(double field_v_per_m, double mu);

// <l_to| cos(phi) or sin(phi) |l_from> on the planar-rotor circle; nonzero
// only for |l_to - l_from| = 1.
std::complex<double> rotor_matrix_element(CouplingForm form, int l_from,
                                          int l_to);

struct ModeCoupling {
  NormalMode mode;
  CouplingForm form = CouplingForm::cosine;
  double field = 0.0;  // V/m, signed
  double g = 0.0;      // rad/s, signed

  double g_hz() const { return g / (2.0 * constants::pi); }
};

// Coupling data for every mode of the set, axial then radial, each ascending
// in frequency.
std::vector<ModeCoupling> build_couplings(const ModeSet& set,
                                          const CrystalConfig& cfg,
                                          const RotorProperties& rotor);

}  // namespace rotorphonon
