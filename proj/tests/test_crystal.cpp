#include <doctest.h>

#include <cmath>
#include <random>

#include "rotorphonon/crystal.hpp"

using namespace rotorphonon;

namespace {

constexpr double u = constants::amu;
constexpr double pi = constants::pi;

CrystalConfig triple(double atom_u, double rotor_u, double nu_z, double nu_y,
                     RadialScaling rs = RadialScaling::pseudopotential) {
  CrystalConfig c;
  c.particles = {{atom_u * u, 1, ParticleKind::atom},
                 {rotor_u * u, 1, ParticleKind::rotor},
                 {atom_u * u, 1, ParticleKind::atom}};
  c.trap = {2.0 * pi * nu_z, 2.0 * pi * nu_y, rs};
  return c;
}

}  // namespace

TEST_CASE("length scale of the reference ion") {
  // (C / kappa)^{1/3} for 173 u at nu_z = 2 MHz.
  const CrystalConfig c = triple(173.0, 173.0, 2.0e6, 1.0e7);
  CHECK(c.length_scale() ==
        doctest::Approx(1.7196857332402370e-6).epsilon(1e-12));
}

TEST_CASE("potential energy basics") {
  CrystalConfig c;
  c.particles = {{100.0 * u, 1, ParticleKind::rotor}};
  c.trap = {2.0 * pi * 2.0e6, 2.0 * pi * 1.0e7, RadialScaling::pseudopotential};
  CHECK(potential_energy(c, {0.0}) == 0.0);

  const CrystalConfig t = triple(173.0, 173.0, 2.0e6, 1.0e7);
  CHECK_THROWS_AS(potential_energy(t, {0.0, 0.0, 1e-6}), validation_error);
  CHECK_THROWS_AS(potential_energy(t, {0.0, 1e-6}), validation_error);
}

TEST_CASE("potential energy is mirror symmetric for a symmetric chain") {
  const CrystalConfig c = triple(173.0, 4116.0, 2.0e6, 1.0e7);
  const double ell = c.length_scale();
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z{pos(rng) * ell, pos(rng) * ell, pos(rng) * ell};
    std::sort(z.begin(), z.end());
    if (z[1] - z[0] < 0.2 * ell || z[2] - z[1] < 0.2 * ell) continue;
    const std::vector<double> zr{-z[2], -z[1], -z[0]};
    const double a = potential_energy(c, z);
    const double b = potential_energy(c, zr);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("axial stiffness matrix matches the numerical curvature of U") {
  const CrystalConfig c = triple(173.0, 4116.0, 2.0e6, 1.0e7);
  const double ell = c.length_scale();
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> pos(-2.5, 2.5);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 5; ++trial) {
    std::vector<double> z{pos(rng) * ell, pos(rng) * ell, pos(rng) * ell};
    std::sort(z.begin(), z.end());
    if (z[1] - z[0] < 0.5 * ell || z[2] - z[1] < 0.5 * ell) continue;
    ++checked;

    const Eigen::MatrixXd a = hessian(c, z, Direction::axial);
    const double h = 1e-4 * ell;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double kij =
            a(i, j) * std::sqrt(c.particles[i].mass * c.particles[j].mass);
        double fd;
        if (i == j) {
          std::vector<double> zp = z, zm = z;
          zp[i] += h;
          zm[i] -= h;
          fd = (potential_energy(c, zp) - 2.0 * potential_energy(c, z) +
                potential_energy(c, zm)) /
               (h * h);
        } else {
          std::vector<double> zpp = z, zpm = z, zmp = z, zmm = z;
          zpp[i] += h; zpp[j] += h;
          zpm[i] += h; zpm[j] -= h;
          zmp[i] -= h; zmp[j] += h;
          zmm[i] -= h; zmm[j] -= h;
          fd = (potential_energy(c, zpp) - potential_energy(c, zpm) -
                potential_energy(c, zmp) + potential_energy(c, zmm)) /
               (4.0 * h * h);
        }
        CHECK(kij == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
  CHECK(checked == 5);
}

TEST_CASE("equilibrium of three equal ions") {
  const CrystalConfig c = triple(173.0, 173.0, 2.0e6, 1.0e7);
  const double ell = c.length_scale();
  const EquilibriumResult eq = equilibrium_positions(c);
  const double d = std::cbrt(1.25) * ell;
  CHECK(eq.z[0] == doctest::Approx(-d).epsilon(1e-12));
  CHECK(std::abs(eq.z[1]) < 1e-12 * ell);
  CHECK(eq.z[2] == doctest::Approx(d).epsilon(1e-12));
  CHECK(eq.residual <
        1e-9 * constants::coulomb_e2 / (ell * ell));
  CHECK(eq.iterations < 200);
}

TEST_CASE("equilibrium of two equal ions") {
  CrystalConfig c;
  c.particles = {{173.0 * u, 1, ParticleKind::atom},
                 {173.0 * u, 1, ParticleKind::rotor}};
  c.trap = {2.0 * pi * 2.0e6, 2.0 * pi * 1.0e7, RadialScaling::pseudopotential};
  const double ell = c.length_scale();
  const EquilibriumResult eq = equilibrium_positions(c);
  const double zhalf = std::pow(2.0, -2.0 / 3.0) * ell;
  CHECK(eq.z[0] == doctest::Approx(-zhalf).epsilon(1e-12));
  CHECK(eq.z[1] == doctest::Approx(+zhalf).epsilon(1e-12));
}

TEST_CASE("equilibrium positions ignore masses when charges are equal") {
  // The force balance involves charges and the trap stiffness only, and the
  // Newton path is deterministic, so position arrays agree bit for bit.
  const EquilibriumResult a =
      equilibrium_positions(triple(173.0, 100.0, 2.0e6, 1.0e7));
  const EquilibriumResult b =
      equilibrium_positions(triple(173.0, 1.0e6, 2.0e6, 1.0e7));
  for (int i = 0; i < 3; ++i) CHECK(a.z[i] == b.z[i]);
}

TEST_CASE("a doubly charged rotor pushes its neighbors out") {
  CrystalConfig c1 = triple(173.0, 4116.0, 2.0e6, 1.0e7);
  CrystalConfig c2 = c1;
  c2.particles[1].charge = 2;
  const double d1 = equilibrium_positions(c1).z[2];
  const double d2 = equilibrium_positions(c2).z[2];
  CHECK(d2 > d1 * 1.1);
}

TEST_CASE("stiffness matrices of three equal ions, closed form") {
  const double nu_z = 2.0e6, nu_y = 1.0e7;
  const CrystalConfig c = triple(173.0, 173.0, nu_z, nu_y);
  const EquilibriumResult eq = equilibrium_positions(c);
  const double wz2 = std::pow(2.0 * pi * nu_z, 2);
  const double wy2 = std::pow(2.0 * pi * nu_y, 2);

  // Nearest-neighbor Coulomb curvature is (8/5) kappa, next-nearest (1/5).
  const Eigen::MatrixXd az = hessian(c, eq.z, Direction::axial);
  const double expect_z[3][3] = {{2.8, -1.6, -0.2},
                                 {-1.6, 4.2, -1.6},
                                 {-0.2, -1.6, 2.8}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(az(i, j) == doctest::Approx(expect_z[i][j] * wz2).epsilon(1e-12));

  const Eigen::MatrixXd ay = hessian(c, eq.z, Direction::radial);
  const double expect_y[3][3] = {{-0.9, 0.8, 0.1},
                                 {0.8, -1.6, 0.8},
                                 {0.1, 0.8, -0.9}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = (i == j ? wy2 : 0.0) + expect_y[i][j] * wz2;
      CHECK(ay(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("normal modes of three equal ions") {
  const double nu_z = 2.0e6, nu_y = 1.0e7;
  const ModeSet set = normal_modes(triple(173.0, 173.0, nu_z, nu_y));

  REQUIRE(set.axial.size() == 3);
  CHECK(set.axial[0].nu() == doctest::Approx(nu_z).epsilon(1e-9));
  CHECK(set.axial[1].nu() ==
        doctest::Approx(nu_z * std::sqrt(3.0)).epsilon(1e-9));
  CHECK(set.axial[2].nu() ==
        doctest::Approx(nu_z * std::sqrt(29.0 / 5.0)).epsilon(1e-9));

  REQUIRE(set.radial.size() == 3);
  CHECK(set.radial[0].nu() ==
        doctest::Approx(std::sqrt(nu_y * nu_y - 2.4 * nu_z * nu_z))
            .epsilon(1e-9));
  CHECK(set.radial[1].nu() ==
        doctest::Approx(std::sqrt(nu_y * nu_y - nu_z * nu_z)).epsilon(1e-9));
  CHECK(set.radial[2].nu() == doctest::Approx(nu_y).epsilon(1e-9));

  // Frequency ratios pin the spectrum independent of the absolute scale.
  CHECK(set.axial[1].nu() / set.axial[0].nu() ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(set.axial[2].nu() / set.axial[0].nu() ==
        doctest::Approx(std::sqrt(5.8)).epsilon(1e-9));
}

TEST_CASE("breathing eigenvector is exact under the sign convention") {
  const ModeSet set = normal_modes(triple(173.0, 173.0, 2.0e6, 1.0e7));
  const NormalMode& breathing = set.axial[1];
  CHECK(breathing.parity == Parity::odd);
  CHECK(breathing.b[0] ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(breathing.b[1] == 0.0);
  CHECK(breathing.b[2] == -breathing.b[0]);
}

TEST_CASE("mode eigenvectors are orthonormal and conserve the trace") {
  const CrystalConfig c = triple(173.0, 4116.0, 2.0e6, 1.0e7,
                                 RadialScaling::uniform);
  const ModeSet set = normal_modes(c);
  for (Direction d : {Direction::axial, Direction::radial}) {
    const auto& modes = set.modes(d);
    for (size_t p = 0; p < modes.size(); ++p) {
      for (size_t q = 0; q < modes.size(); ++q) {
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += modes[p].b[i] * modes[q].b[i];
        CHECK(dot == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
    const Eigen::MatrixXd a = hessian(c, set.equilibrium.z, d);
    double sum = 0.0;
    for (const auto& m : modes) sum += m.omega * m.omega;
    CHECK(sum == doctest::Approx(a.trace()).epsilon(1e-12));
  }
}

TEST_CASE("heavy rotor decouples and the antisymmetric branch saturates") {
  // With the center particle pinned by its inertia, the flanking ions
  // oscillate at sqrt(13/5) nu_z when moving in phase against the rotor,
  // while the anti-phase pair stays at sqrt(3) nu_z.
  const CrystalConfig c = triple(173.0, 1.0e7, 2.0e6, 1.0e7,
                                 RadialScaling::uniform);
  const ModeSet set = labeled_modes(c);
  const double limit = 2.0e6 * std::sqrt(13.0 / 5.0);
  CHECK(set.axial[1].label == ModeLabel::egyptian);
  CHECK(set.axial[1].nu() == doctest::Approx(limit).epsilon(1e-4));
  CHECK(set.axial[2].label == ModeLabel::breathing);
  CHECK(set.axial[2].nu() ==
        doctest::Approx(2.0e6 * std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("radial confinement boundary for three equal ions") {
  // The lowest radial eigenvalue crosses zero at omega_y^2 = 2.4 omega_z^2.
  const double nu_z = 2.0e6;
  const double nu_boundary = std::sqrt(2.4) * nu_z;
  const CrystalConfig below = triple(173.0, 173.0, nu_z,
                                     nu_boundary * (1.0 - 1e-6));
  const EquilibriumResult eq = equilibrium_positions(below);
  CHECK_THROWS_AS(normal_modes(below, eq, Direction::radial),
                  instability_error);
  CHECK_THROWS_WITH_AS(normal_modes(below, eq, Direction::radial),
                       doctest::Contains("radial"), instability_error);

  const CrystalConfig above = triple(173.0, 173.0, nu_z,
                                     nu_boundary * (1.0 + 1e-6));
  const std::vector<NormalMode> ok =
      normal_modes(above, equilibrium_positions(above), Direction::radial);
  CHECK(ok[0].nu() < 0.01 * nu_z);  // soft zigzag right above threshold
}

TEST_CASE("pseudopotential scaling destabilizes heavy rotors radially") {
  const CrystalConfig heavy = triple(173.0, 1.0e5, 2.0e6, 1.0e7,
                                     RadialScaling::pseudopotential);
  const EquilibriumResult eq = equilibrium_positions(heavy);
  CHECK_THROWS_AS(normal_modes(heavy, eq, Direction::radial),
                  instability_error);
  // Same chain is fine axially, and fine radially under uniform scaling.
  CHECK_NOTHROW(normal_modes(heavy, eq, Direction::axial));
  CrystalConfig uni = heavy;
  uni.trap.radial_scaling = RadialScaling::uniform;
  CHECK_NOTHROW(normal_modes(uni, eq, Direction::radial));
}

TEST_CASE("mode labels for a light rotor") {
  const ModeSet set = labeled_modes(triple(173.0, 100.0, 2.0e6, 1.0e7,
                                           RadialScaling::uniform));
  CHECK(set.axial[0].label == ModeLabel::com);
  CHECK(set.axial[1].label == ModeLabel::breathing);
  CHECK(set.axial[2].label == ModeLabel::egyptian);
  CHECK(set.radial[0].label == ModeLabel::rocking);
  CHECK(set.radial[1].label == ModeLabel::zigzag);
  CHECK(set.radial[2].label == ModeLabel::com);
}

TEST_CASE("mode labels for a heavy rotor") {
  const ModeSet set = labeled_modes(triple(173.0, 4116.0, 2.0e6, 1.0e7,
                                           RadialScaling::uniform));
  CHECK(set.axial[0].label == ModeLabel::com);
  CHECK(set.axial[1].label == ModeLabel::egyptian);
  CHECK(set.axial[2].label == ModeLabel::breathing);
  CHECK(set.radial[0].label == ModeLabel::zigzag);
  CHECK(set.radial[1].label == ModeLabel::rocking);
  CHECK(set.radial[2].label == ModeLabel::com);
  // The Egyptian pattern moves the atoms against the rotor.
  const NormalMode& eg = set.axial[1];
  CHECK(eg.parity == Parity::even);
  CHECK(eg.b[0] * eg.b[1] < 0.0);
}

TEST_CASE("an asymmetric chain stays unlabeled") {
  CrystalConfig c;
  c.particles = {{173.0 * u, 1, ParticleKind::atom},
                 {4116.0 * u, 1, ParticleKind::rotor},
                 {171.0 * u, 1, ParticleKind::atom}};
  c.trap = {2.0 * pi * 2.0e6, 2.0 * pi * 1.0e7, RadialScaling::uniform};
  const ModeSet set = labeled_modes(c);
  for (const auto& m : set.axial) CHECK(m.label == ModeLabel::unlabeled);
  for (const auto& m : set.radial) CHECK(m.label == ModeLabel::unlabeled);
}

TEST_CASE("branch tracking recovers a permutation") {
  const ModeSet set = labeled_modes(triple(173.0, 4116.0, 2.0e6, 1.0e7,
                                           RadialScaling::uniform));
  const std::vector<NormalMode>& from = set.radial;

  SUBCASE("identity") {
    const TrackResult tr = track_branches(from, from);
    for (int p = 0; p < 3; ++p) CHECK(tr.map[p] == p);
    CHECK(tr.min_overlap == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(tr.ambiguous);
  }

  SUBCASE("shuffled copy") {
    const std::vector<NormalMode> to{from[2], from[0], from[1]};
    const TrackResult tr = track_branches(from, to);
    CHECK(tr.map[0] == 1);
    CHECK(tr.map[1] == 2);
    CHECK(tr.map[2] == 0);
    CHECK_FALSE(tr.ambiguous);
  }
}

TEST_CASE("branch tracking flags a frame with no clear continuation") {
  auto mode = [](std::vector<double> b) {
    NormalMode m;
    m.direction = Direction::radial;
    m.omega = 1.0;
    m.b = std::move(b);
    return m;
  };
  const double s3 = 1.0 / std::sqrt(3.0);
  const double s6 = 1.0 / std::sqrt(6.0);
  const double s2 = 1.0 / std::sqrt(2.0);
  const std::vector<NormalMode> from{mode({1.0, 0.0, 0.0}),
                                     mode({0.0, 1.0, 0.0}),
                                     mode({0.0, 0.0, 1.0})};
  const std::vector<NormalMode> to{mode({s3, s3, s3}),
                                   mode({s6, -2.0 * s6, s6}),
                                   mode({s2, 0.0, -s2})};
  const TrackResult tr = track_branches(from, to);
  CHECK(tr.ambiguous);
  CHECK(tr.min_overlap == doctest::Approx(s3).epsilon(1e-12));
  // Still a bijection onto the new modes.
  std::vector<bool> seen(3, false);
  for (int p = 0; p < 3; ++p) {
    CHECK(tr.map[p] >= 0);
    seen[tr.map[p]] = true;
  }
  CHECK((seen[0] && seen[1] && seen[2]));
}

TEST_CASE("crystal validation lists every violation") {
  CrystalConfig c;
  c.particles = {{-1.0, 0, ParticleKind::atom},
                 {1.0 * u, 1, ParticleKind::atom}};
  c.trap = {0.0, 2.0 * pi * 1.0e7, RadialScaling::pseudopotential};
  try {
    c.validate();
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("mass") != std::string::npos);
    CHECK(msg.find("charge") != std::string::npos);
    CHECK(msg.find("rotor") != std::string::npos);
    CHECK(msg.find("omega_z") != std::string::npos);
  }
}
