#include "rotorphonon/coupling.hpp"

#include <cmath>

namespace rotorphonon {

const char* to_string(CouplingForm f) {
  return f == CouplingForm::cosine ? "cosine" : "sine";
}

double rotational_constant_sphere(double mass_kg, double radius_m) {
  if (!(mass_kg > 0.0) || !(radius_m > 0.0))
    throw validation_error("sphere model needs positive mass and radius");
  const double inertia = 0.4 * mass_kg * radius_m * radius_m;
  return constants::hbar * constants::hbar / (2.0 * inertia) /
         constants::h_planck;
}

double field_scale(const NormalMode& mode, double rotor_mass, int rotor_index) {
  if (rotor_index < 0 || rotor_index >= static_cast<int>(mode.b.size()))
    throw validation_error("rotor index outside the eigenvector");
  if (!(rotor_mass > 0.0)) throw validation_error("rotor mass must be > 0");
  const double w = mode.omega;
  const double e2 = constants::e_charge * constants::e_charge;
  return mode.b[rotor_index] *
         std::sqrt(constants::hbar * w * w * w * rotor_mass / (2.0 * e2));
}

double coupling_rate(double field_v_per_m, double mu) {
  return mu * field_v_per_m / (2.0 * constants::hbar);
}

std::complex<double> rotor_matrix_element(CouplingForm form, int l_from,
                                          int l_to) {
  const int dl = l_to - l_from;
  if (dl != 1 && dl != -1) return {0.0, 0.0};
  if (form == CouplingForm::cosine) return {0.5, 0.0};
  // sin(phi) = (e^{i phi} - e^{-i phi}) / (2i): raising picks up 1/(2i).
  return dl == 1 ? std::complex<double>{0.0, -0.5}
                 : std::complex<double>{0.0, 0.5};
}

std::vector<ModeCoupling> build_couplings(const ModeSet& set,
                                          const CrystalConfig& cfg,
                                          const RotorProperties& rotor) {
  const int ri = cfg.rotor_index();
  std::vector<ModeCoupling> out;
  out.reserve(set.axial.size() + set.radial.size());
  for (Direction dir : {Direction::axial, Direction::radial}) {
    for (const NormalMode& m : set.modes(dir)) {
      ModeCoupling c;
      c.mode = m;
      c.form = dir == Direction::axial ? CouplingForm::cosine
                                       : CouplingForm::sine;
      c.field = field_scale(m, rotor.mass, ri);
      c.g = coupling_rate(c.field, rotor.mu);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace rotorphonon
