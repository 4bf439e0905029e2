#pragma once
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotorphonon/constants.hpp"
#include "rotorphonon/errors.hpp"

namespace rotorphonon {

enum class Direction { axial, radial };
enum class ParticleKind { atom, rotor };

// How the radial confinement of a non-reference species relates to the
// reference atom's. `pseudopotential` follows an RF trap (stiffness falls as
// q^2/m); `uniform` gives every charge the same static radial stiffness,
// matching the axial rule.
enum class RadialScaling { pseudopotential, uniform };

enum class ModeLabel { unlabeled, com, breathing, egyptian, rocking, zigzag };

// Symmetry of the displacement pattern under reversal of the particle order.
enum class Parity { none, even, odd };

const char* to_string(Direction d);
const char* to_string(ModeLabel m);
const char* to_string(Parity p);
const char* to_string(RadialScaling s);

struct ParticleSpec {
  double mass = 0.0;  // kg
  int charge = 1;     // units of e, >= 1
  ParticleKind kind = ParticleKind::atom;
};

struct TrapConfig {
  double omega_z = 0.0;  // rad/s, axial secular frequency of the reference atom
  double omega_y = 0.0;  // rad/s, radial secular frequency of the reference atom
  RadialScaling radial_scaling = RadialScaling::pseudopotential;
};

// A linear chain of charged particles, ordered left to right along z.
// Exactly one particle is the rotor. The reference particle (first atom)
// defines the trap stiffness scale and the length unit.
struct CrystalConfig {
  std::vector<ParticleSpec> particles;
  TrapConfig trap;

  void validate() const;  // throws validation_error listing every violation

  int size() const { return static_cast<int>(particles.size()); }
  int rotor_index() const;
  int reference_index() const;

  double kappa_z(int i) const;  // N/m
  double kappa_y(int i) const;  // N/m
  double length_scale() const;  // m, (C / kappa_z_ref)^(1/3)

  // True when masses, charges and kinds read the same from both ends.
  bool mirror_symmetric() const;
};

struct EquilibriumResult {
  std::vector<double> z;  // m, same order as particles
  int iterations = 0;
  double residual = 0.0;  // max |dU/dz_i| at the solution, N
};

struct NormalMode {
  Direction direction = Direction::axial;
  double omega = 0.0;      // rad/s
  std::vector<double> b;   // mass-weighted displacement pattern, unit norm
  ModeLabel label = ModeLabel::unlabeled;
  Parity parity = Parity::none;

  double nu() const { return omega / (2.0 * constants::pi); }
};

struct ModeSet {
  EquilibriumResult equilibrium;
  std::vector<NormalMode> axial;   // ascending frequency
  std::vector<NormalMode> radial;  // ascending frequency

  const std::vector<NormalMode>& modes(Direction d) const {
    return d == Direction::axial ? axial : radial;
  }
  std::vector<NormalMode>& modes(Direction d) {
    return d == Direction::axial ? axial : radial;
  }
};

// Total potential energy (trap + Coulomb) of the chain at axial positions z.
// Positions need not be ordered; coincident positions are a domain error.
double potential_energy(const CrystalConfig& cfg, const std::vector<double>& z);

// Newton iteration from a uniformly spaced start. Preserves the particle
// ordering and polishes the residual to machine level.
EquilibriumResult equilibrium_positions(const CrystalConfig& cfg);

// Mass-weighted stiffness matrix A_ij = K_ij / sqrt(m_i m_j) about z;
// eigenvalues of A are the squared angular mode frequencies.
Eigen::MatrixXd hessian(const CrystalConfig& cfg, const std::vector<double>& z,
                        Direction dir);

// Modes of one direction, ascending in frequency, eigenvectors unit-norm in
// mass-weighted coordinates. Sign convention: the component of largest
// magnitude is positive, ties broken by the lowest index. For a
// mirror-symmetric crystal the patterns are exact parity eigenvectors.
// Throws instability_error if any eigenvalue is non-positive.
std::vector<NormalMode> normal_modes(const CrystalConfig& cfg,
                                     const EquilibriumResult& eq, Direction dir);

// Both directions from a fresh equilibrium solve.
ModeSet normal_modes(const CrystalConfig& cfg);

// Attach labels and parities in place. Labels are only assigned to
// mirror-symmetric three-particle chains with the rotor in the middle;
// anything else stays unlabeled.
void classify_modes(const CrystalConfig& cfg, std::vector<NormalMode>& modes);
void classify_modes(const CrystalConfig& cfg, ModeSet& set);

// Equilibrium + modes + labels in one call.
ModeSet labeled_modes(const CrystalConfig& cfg);

struct TrackResult {
  std::vector<int> map;       // map[p] = index in `to` continuing branch p
  double min_overlap = 0.0;   // smallest |<b_from, b_to>| among assignments
  bool ambiguous = false;     // min_overlap < 1/sqrt(2)
};

// Continue branch identities from one parameter point to the next by greedy
// best-overlap assignment of eigenvector patterns.
TrackResult track_branches(const std::vector<NormalMode>& from,
                           const std::vector<NormalMode>& to);

}  // namespace rotorphonon
