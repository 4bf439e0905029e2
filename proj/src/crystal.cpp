#include "rotorphonon/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rotorphonon {

const char* to_string(Direction d) {
  return d == Direction::axial ? "axial" : "radial";
}

const char* to_string(ModeLabel m) {
  switch (m) {
    case ModeLabel::com:       return "com";
    case ModeLabel::breathing: return "breathing";
    case ModeLabel::egyptian:  return "egyptian";
    case ModeLabel::rocking:   return "rocking";
    case ModeLabel::zigzag:    return "zigzag";
    default:                   return "unlabeled";
  }
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd:  return "odd";
    default:           return "none";
  }
}

const char* to_string(RadialScaling s) {
  return s == RadialScaling::pseudopotential ? "pseudopotential" : "uniform";
}

void CrystalConfig::validate() const {
  std::vector<std::string> bad;
  if (particles.empty()) bad.push_back("particles: empty");
  int rotors = 0;
  for (size_t i = 0; i < particles.size(); ++i) {
    const auto& p = particles[i];
    if (!(p.mass > 0.0))
      bad.push_back("particles[" + std::to_string(i) + "].mass: must be > 0");
    if (p.charge < 1)
      bad.push_back("particles[" + std::to_string(i) + "].charge: must be >= 1");
    if (p.kind == ParticleKind::rotor) ++rotors;
  }
  if (rotors != 1)
    bad.push_back("particles: need exactly one rotor, got " +
                  std::to_string(rotors));
  if (!(trap.omega_z > 0.0)) bad.push_back("trap.omega_z: must be > 0");
  if (!(trap.omega_y > 0.0)) bad.push_back("trap.omega_y: must be > 0");
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid crystal configuration:";
    for (const auto& b : bad) msg << "\n  - " << b;
    throw validation_error(msg.str());
  }
}

int CrystalConfig::rotor_index() const {
  for (int i = 0; i < size(); ++i)
    if (particles[i].kind == ParticleKind::rotor) return i;
  throw validation_error("crystal has no rotor");
}

int CrystalConfig::reference_index() const {
  // First atom sets the stiffness scale; a rotor-only chain references itself.
  for (int i = 0; i < size(); ++i)
    if (particles[i].kind == ParticleKind::atom) return i;
  return 0;
}

double CrystalConfig::kappa_z(int i) const {
  const auto& ref = particles[reference_index()];
  const double per_charge = ref.mass * trap.omega_z * trap.omega_z / ref.charge;
  return particles[i].charge * per_charge;
}

double CrystalConfig::kappa_y(int i) const {
  const auto& ref = particles[reference_index()];
  const double wy2 = trap.omega_y * trap.omega_y;
  if (trap.radial_scaling == RadialScaling::uniform)
    return particles[i].charge * ref.mass * wy2 / ref.charge;
  const double qr = static_cast<double>(particles[i].charge) / ref.charge;
  return qr * qr * (ref.mass / particles[i].mass) * ref.mass * wy2;
}

double CrystalConfig::length_scale() const {
  return std::cbrt(constants::coulomb_e2 / kappa_z(reference_index()));
}

bool CrystalConfig::mirror_symmetric() const {
  const int n = size();
  for (int i = 0; i < n / 2; ++i) {
    const auto& a = particles[i];
    const auto& b = particles[n - 1 - i];
    if (a.mass != b.mass || a.charge != b.charge || a.kind != b.kind)
      return false;
  }
  return true;
}

namespace {

// dU/dz_i for all particles, in N.
std::vector<double> gradient(const CrystalConfig& cfg,
                             const std::vector<double>& z) {
  const int n = cfg.size();
  std::vector<double> g(n, 0.0);
  for (int i = 0; i < n; ++i) g[i] = cfg.kappa_z(i) * z[i];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double qq = cfg.particles[i].charge * cfg.particles[j].charge;
      const double d = z[i] - z[j];
      // d(C qq / |d|)/dz_i = -C qq sign(d) / d^2
      const double f = constants::coulomb_e2 * qq / (d * d);
      const double s = d > 0.0 ? 1.0 : -1.0;
      g[i] -= s * f;
      g[j] += s * f;
    }
  }
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool strictly_ordered(const std::vector<double>& z) {
  for (size_t i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) return false;
  return true;
}

}  // namespace

double potential_energy(const CrystalConfig& cfg, const std::vector<double>& z) {
  cfg.validate();
  if (static_cast<int>(z.size()) != cfg.size())
    throw validation_error("positions length does not match particle count");
  const int n = cfg.size();
  double u = 0.0;
  for (int i = 0; i < n; ++i) u += 0.5 * cfg.kappa_z(i) * z[i] * z[i];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(z[i] - z[j]);
      if (d == 0.0)
        throw validation_error("coincident particle positions");
      const double qq = cfg.particles[i].charge * cfg.particles[j].charge;
      u += constants::coulomb_e2 * qq / d;
    }
  }
  return u;
}

EquilibriumResult equilibrium_positions(const CrystalConfig& cfg) {
  cfg.validate();
  const int n = cfg.size();
  const double ell = cfg.length_scale();

  EquilibriumResult res;
  res.z.resize(n);
  if (n == 1) {
    res.z[0] = 0.0;
    res.residual = 0.0;
    return res;
  }

  // For equal charges the two- and three-ion spacings are O(ell); a uniform
  // chain at the three-ion spacing is a good start for any small chain.
  const double d0 = std::cbrt(1.25) * ell;
  for (int i = 0; i < n; ++i) res.z[i] = (i - 0.5 * (n - 1)) * d0;

  const double force_scale = constants::coulomb_e2 / (ell * ell);
  const double tol = 1e-9 * force_scale;

  std::vector<double> g = gradient(cfg, res.z);
  double r = max_abs(g);
  const int max_iter = 200;
  int it = 0;
  for (; it < max_iter; ++it) {
    // Converge well past the nominal tolerance; stop once Newton stalls at
    // the rounding floor.
    if (r < 1e-15 * force_scale) break;

    // The axial stiffness matrix is exactly the Jacobian of the gradient.
    Eigen::MatrixXd jac(n, n);
    jac.setZero();
    for (int i = 0; i < n; ++i) jac(i, i) = cfg.kappa_z(i);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double qq = cfg.particles[i].charge * cfg.particles[j].charge;
        const double d = std::abs(res.z[i] - res.z[j]);
        const double k = 2.0 * constants::coulomb_e2 * qq / (d * d * d);
        jac(i, i) += k;
        jac(j, j) += k;
        jac(i, j) -= k;
        jac(j, i) -= k;
      }
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = -g[i];
    Eigen::VectorXd step = jac.ldlt().solve(rhs);

    // Backtrack until the residual drops and the ordering survives.
    double alpha = 1.0;
    std::vector<double> trial(n);
    bool accepted = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      for (int i = 0; i < n; ++i) trial[i] = res.z[i] + alpha * step(i);
      if (!strictly_ordered(trial)) continue;
      std::vector<double> gt = gradient(cfg, trial);
      const double rt = max_abs(gt);
      if (rt < r) {
        res.z = trial;
        g = std::move(gt);
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // at the rounding floor
  }

  if (r >= tol)
    throw numerical_error("equilibrium search did not converge (residual " +
                          std::to_string(r / force_scale) +
                          " in Coulomb units)");
  res.iterations = it;
  res.residual = r;
  return res;
}

Eigen::MatrixXd hessian(const CrystalConfig& cfg, const std::vector<double>& z,
                        Direction dir) {
  cfg.validate();
  if (static_cast<int>(z.size()) != cfg.size())
    throw validation_error("positions length does not match particle count");
  const int n = cfg.size();
  Eigen::MatrixXd k(n, n);
  k.setZero();
  for (int i = 0; i < n; ++i)
    k(i, i) = dir == Direction::axial ? cfg.kappa_z(i) : cfg.kappa_y(i);

  // Coulomb curvature along the chain is twice the transverse one and of
  // opposite sign: +2 C qq / d^3 axially, -C qq / d^3 radially.
  const double axial_sign = dir == Direction::axial ? 2.0 : -1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double qq = cfg.particles[i].charge * cfg.particles[j].charge;
      const double d = std::abs(z[i] - z[j]);
      if (d == 0.0) throw validation_error("coincident particle positions");
      const double c = axial_sign * constants::coulomb_e2 * qq / (d * d * d);
      k(i, i) += c;
      k(j, j) += c;
      k(i, j) -= c;
      k(j, i) -= c;
    }
  }

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = k(i, j) / std::sqrt(cfg.particles[i].mass * cfg.particles[j].mass);
  // Symmetrize exactly; the division above can differ in the last ulp.
  a = 0.5 * (a + a.transpose()).eval();
  return a;
}

namespace {

// Even/odd projection under index reversal; returns Parity::none when the
// vector is not close to either symmetry.
Parity pattern_parity(const std::vector<double>& b, double tol) {
  const int n = static_cast<int>(b.size());
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return Parity::none;
  double even_dev = 0.0, odd_dev = 0.0;
  for (int i = 0; i < n; ++i) {
    even_dev = std::max(even_dev, std::abs(b[i] - b[n - 1 - i]));
    odd_dev = std::max(odd_dev, std::abs(b[i] + b[n - 1 - i]));
  }
  if (even_dev <= tol * scale) return Parity::even;
  if (odd_dev <= tol * scale) return Parity::odd;
  return Parity::none;
}

void apply_sign_convention(std::vector<double>& b) {
  int arg = 0;
  for (int i = 1; i < static_cast<int>(b.size()); ++i)
    if (std::abs(b[i]) > std::abs(b[arg])) arg = i;
  if (b[arg] < 0.0)
    for (double& x : b) x = -x;
}

}  // namespace

std::vector<NormalMode> normal_modes(const CrystalConfig& cfg,
                                     const EquilibriumResult& eq,
                                     Direction dir) {
  const Eigen::MatrixXd a = hessian(cfg, eq.z, dir);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw numerical_error("eigensolver failed on the stiffness matrix");

  const int n = cfg.size();
  const Eigen::VectorXd& vals = solver.eigenvalues();
  if (vals(0) <= 0.0) {
    std::ostringstream msg;
    msg << to_string(dir) << " crystal unstable: lowest squared frequency "
        << vals(0) << " (rad/s)^2";
    throw instability_error(msg.str());
  }

  const bool symmetric = cfg.mirror_symmetric();
  std::vector<NormalMode> modes(n);
  for (int p = 0; p < n; ++p) {
    NormalMode& m = modes[p];
    m.direction = dir;
    m.omega = std::sqrt(vals(p));
    m.b.resize(n);
    for (int i = 0; i < n; ++i) m.b[i] = solver.eigenvectors()(i, p);

    if (symmetric) {
      // Project onto the nearer parity sector so symmetry-forbidden
      // components vanish exactly instead of at rounding level.
      const Parity par = pattern_parity(m.b, 1e-8);
      if (par != Parity::none) {
        const double s = par == Parity::even ? 1.0 : -1.0;
        std::vector<double> proj(n);
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
          proj[i] = 0.5 * (m.b[i] + s * m.b[n - 1 - i]);
          norm2 += proj[i] * proj[i];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < n; ++i) m.b[i] = proj[i] * inv;
        // Re-impose the symmetry exactly after normalization rounding.
        for (int i = 0; i < n - 1 - i; ++i) m.b[n - 1 - i] = s * m.b[i];
        if (par == Parity::odd && n % 2 == 1) m.b[n / 2] = 0.0;
        m.parity = par;
      }
    }
    apply_sign_convention(m.b);
  }
  return modes;
}

ModeSet normal_modes(const CrystalConfig& cfg) {
  ModeSet set;
  set.equilibrium = equilibrium_positions(cfg);
  set.axial = normal_modes(cfg, set.equilibrium, Direction::axial);
  set.radial = normal_modes(cfg, set.equilibrium, Direction::radial);
  return set;
}

void classify_modes(const CrystalConfig& cfg, std::vector<NormalMode>& modes) {
  // Labels only make sense for the symmetric atom-rotor-atom chain.
  const bool labelable = cfg.size() == 3 && cfg.mirror_symmetric() &&
                         cfg.rotor_index() == 1;
  for (NormalMode& m : modes) {
    if (m.parity == Parity::none)
      m.parity = pattern_parity(m.b, 1e-8);
    if (!labelable) {
      m.label = ModeLabel::unlabeled;
      continue;
    }
    if (m.parity == Parity::odd) {
      m.label = m.direction == Direction::axial ? ModeLabel::breathing
                                                : ModeLabel::rocking;
    } else if (m.parity == Parity::even) {
      // Even modes split by whether the rotor moves with or against the
      // atoms. A zero atom component counts as co-moving.
      const double sa = m.b[0];
      const double sr = m.b[1];
      const bool opposed = sa * sr < 0.0;
      if (!opposed) {
        m.label = ModeLabel::com;
      } else {
        m.label = m.direction == Direction::axial ? ModeLabel::egyptian
                                                  : ModeLabel::zigzag;
      }
    } else {
      m.label = ModeLabel::unlabeled;
    }
  }
}

void classify_modes(const CrystalConfig& cfg, ModeSet& set) {
  classify_modes(cfg, set.axial);
  classify_modes(cfg, set.radial);
}

ModeSet labeled_modes(const CrystalConfig& cfg) {
  ModeSet set = normal_modes(cfg);
  classify_modes(cfg, set);
  return set;
}

TrackResult track_branches(const std::vector<NormalMode>& from,
                           const std::vector<NormalMode>& to) {
  const int n = static_cast<int>(from.size());
  if (static_cast<int>(to.size()) != n)
    throw validation_error("branch tracking needs equal mode counts");
  if (n == 0) return {{}, 1.0, false};

  struct Pair {
    double overlap;
    int p, q;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += from[p].b[i] * to[q].b[i];
      pairs.push_back({std::abs(dot), p, q});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
  });

  TrackResult res;
  res.map.assign(n, -1);
  std::vector<bool> taken(n, false);
  res.min_overlap = 1.0;
  int assigned = 0;
  for (const Pair& pr : pairs) {
    if (assigned == n) break;
    if (res.map[pr.p] != -1 || taken[pr.q]) continue;
    res.map[pr.p] = pr.q;
    taken[pr.q] = true;
    res.min_overlap = std::min(res.min_overlap, pr.overlap);
    ++assigned;
  }
  res.ambiguous = res.min_overlap < 1.0 / std::sqrt(2.0);
  return res;
}

}  // namespace rotorphonon
