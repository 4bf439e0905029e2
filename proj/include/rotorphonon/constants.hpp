#pragma once
#include <numbers>

// Physical constants, SI. 2018 CODATA; e and hbar are exact by definition.
namespace rotorphonon::constants {

inline constexpr double amu       = 1.66053906660e-27;  // kg
inline constexpr double e_charge  = 1.602176634e-19;    // C
inline constexpr double hbar      = 1.054571817e-34;    // J s
inline constexpr double k_coulomb = 8.9875517923e9;     // N m^2 / C^2
inline constexpr double debye     = 3.33564e-30;        // C m

inline constexpr double pi       = std::numbers::pi;
inline constexpr double h_planck = 2.0 * pi * hbar;     // J s; keep tied to hbar

// Coulomb energy prefactor for a unit-charge pair: e^2 / (4 pi eps0), in J m.
inline constexpr double coulomb_e2 = k_coulomb * e_charge * e_charge;

}  // namespace rotorphonon::constants
