#include "rotorphonon/scenario.hpp"

#include <sstream>

namespace rotorphonon {

void Scenario::validate() const {
  std::vector<std::string> bad;
  if (!(atom_mass > 0.0)) bad.push_back("atom mass must be > 0");
  if (atom_charge < 1) bad.push_back("atom charge must be >= 1");
  if (count_per_side < 1) bad.push_back("count_per_side must be >= 1");
  if (!(rotor_mass > 0.0)) bad.push_back("rotor mass must be > 0");
  if (rotor_charge < 1) bad.push_back("rotor charge must be >= 1");
  if (dipole < 0.0) bad.push_back("dipole must be >= 0");
  if (b_hz.has_value() == sphere_radius.has_value())
    bad.push_back("exactly one of rotor B or sphere radius must be given");
  if (b_hz && !(*b_hz > 0.0)) bad.push_back("rotor B must be > 0");
  if (sphere_radius && !(*sphere_radius > 0.0))
    bad.push_back("sphere radius must be > 0");
  if (!(nu_z > 0.0)) bad.push_back("nu_z must be > 0");
  if (!(nu_y > 0.0)) bad.push_back("nu_y must be > 0");
  if (basis.n_max < 1) bad.push_back("n_max must be >= 1");
  if (basis.l_max < 2) bad.push_back("l_max must be >= 2");
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const auto& b : bad) msg << "\n  - " << b;
    throw validation_error(msg.str());
  }
}

double Scenario::B() const {
  if (b_hz) return *b_hz;
  if (sphere_radius)
    return rotational_constant_sphere(rotor_mass, *sphere_radius);
  throw validation_error("rotor rotational constant is not specified");
}

CrystalConfig Scenario::crystal() const {
  CrystalConfig cfg;
  cfg.trap.omega_z = 2.0 * constants::pi * nu_z;
  cfg.trap.omega_y = 2.0 * constants::pi * nu_y;
  cfg.trap.radial_scaling = radial_scaling;
  const ParticleSpec atom{atom_mass, atom_charge, ParticleKind::atom};
  const ParticleSpec rot{rotor_mass, rotor_charge, ParticleKind::rotor};
  cfg.particles.reserve(2 * count_per_side + 1);
  for (int i = 0; i < count_per_side; ++i) cfg.particles.push_back(atom);
  cfg.particles.push_back(rot);
  for (int i = 0; i < count_per_side; ++i) cfg.particles.push_back(atom);
  return cfg;
}

RotorProperties Scenario::rotor() const {
  return {rotor_mass, dipole, B()};
}

}  // namespace rotorphonon
