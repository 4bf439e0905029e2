#pragma once
#include <optional>
#include <string>

#include "rotorphonon/coupling.hpp"
#include "rotorphonon/crystal.hpp"
#include "rotorphonon/spectrum.hpp"

namespace rotorphonon {

// User-level description of one trapped chain: identical atoms flanking a
// single rotor, plus trap settings and the product-basis truncation. All
// quantities SI except where the name says otherwise.
struct Scenario {
  double atom_mass = 0.0;   // kg
  int atom_charge = 1;
  int count_per_side = 1;   // atoms on each side of the rotor

  double rotor_mass = 0.0;  // kg
  int rotor_charge = 1;
  double dipole = 0.0;      // C m

  // Exactly one of the two ways to fix the rotational constant.
  std::optional<double> b_hz;
  std::optional<double> sphere_radius;  // m; B from the uniform-sphere inertia

  double nu_z = 0.0;  // Hz
  double nu_y = 0.0;  // Hz
  RadialScaling radial_scaling = RadialScaling::pseudopotential;

  BasisTruncation basis;

  void validate() const;
  double B() const;  // Hz, resolved from whichever source is set

  CrystalConfig crystal() const;
  RotorProperties rotor() const;
};

}  // namespace rotorphonon
