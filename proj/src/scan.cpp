#include "rotorphonon/scan.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace rotorphonon {

const char* to_string(ScanParameter p) {
  switch (p) {
    case ScanParameter::rotor_mass: return "rotor_mass";
    case ScanParameter::nu_z:       return "nu_z";
    case ScanParameter::nu_y:       return "nu_y";
    case ScanParameter::dipole:     return "dipole";
    default:                        return "rot_const";
  }
}

const char* to_string(GridSpacing s) {
  return s == GridSpacing::linear ? "linear" : "log";
}

const char* to_string(Observable o) {
  switch (o) {
    case Observable::mode_freqs:      return "mode_freqs";
    case Observable::coupling:        return "coupling";
    case Observable::pt_shift:        return "pt_shift";
    case Observable::sideband_shift:  return "sideband_shift";
    case Observable::eigenvectors:    return "eigenvectors";
    default:                          return "dressed_eigenvalues";
  }
}

std::vector<double> make_grid(double min, double max, int steps,
                              GridSpacing spacing) {
  if (steps < 2) throw validation_error("grid needs at least 2 steps");
  if (!(max > min)) throw validation_error("grid needs min < max");
  if (spacing == GridSpacing::log && !(min > 0.0))
    throw validation_error("log grid needs min > 0");
  std::vector<double> g(steps);
  if (spacing == GridSpacing::linear) {
    const double h = (max - min) / (steps - 1);
    for (int i = 0; i < steps; ++i) g[i] = min + h * i;
  } else {
    const double la = std::log(min), lb = std::log(max);
    const double h = (lb - la) / (steps - 1);
    for (int i = 0; i < steps; ++i) g[i] = std::exp(la + h * i);
  }
  g.front() = min;
  g.back() = max;
  return g;
}

void ScanSpec::validate() const {
  std::vector<std::string> bad;
  if (grid.empty()) bad.push_back("grid is empty");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) bad.push_back("grid values must be > 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      bad.push_back("grid must be strictly increasing");
      break;
    }
  }
  if (observables.empty()) bad.push_back("no observables requested");
  const bool dressed =
      std::find(observables.begin(), observables.end(),
                Observable::dressed_eigenvalues) != observables.end();
  if (dressed && dressed_levels.empty())
    bad.push_back("dressed_eigenvalues needs at least one level");
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid scan:";
    for (const auto& b : bad) msg << "\n  - " << b;
    throw validation_error(msg.str());
  }
}

int ScanTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

Scenario with_parameter(Scenario s, ScanParameter p, double value) {
  switch (p) {
    case ScanParameter::rotor_mass:
      s.rotor_mass = value * constants::amu;
      break;
    case ScanParameter::nu_z:
      s.nu_z = value;
      break;
    case ScanParameter::nu_y:
      s.nu_y = value;
      break;
    case ScanParameter::dipole:
      s.dipole = value * constants::debye;
      break;
    case ScanParameter::rot_const:
      s.b_hz = value;
      s.sphere_radius.reset();
      break;
  }
  return s;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ROTORPHONON_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == ',' || c == ';') c = ' ';
  return s;
}

struct ModeInfo {
  NormalMode mode;
  double g_hz = nan_v;
  double pt_n0 = nan_v;
  double pt_n1 = nan_v;
  double sideband = nan_v;
};

// One grid point's raw results, before branch identities are assigned.
struct RowData {
  double param = 0.0;
  std::array<std::optional<std::vector<ModeInfo>>, 2> dir_modes;
  std::vector<double> dressed;
  std::vector<std::string> flags;
};

int dir_index(Direction d) { return d == Direction::axial ? 0 : 1; }

bool wants(const ScanSpec& spec, Observable o) {
  return std::find(spec.observables.begin(), spec.observables.end(), o) !=
         spec.observables.end();
}

std::string local_name(Direction d, const NormalMode& m, int idx) {
  std::string s = to_string(d);
  s += "_";
  if (m.label != ModeLabel::unlabeled)
    s += to_string(m.label);
  else
    s += "m" + std::to_string(idx);
  return s;
}

std::vector<NormalMode> to_modes(const std::vector<ModeInfo>& infos) {
  std::vector<NormalMode> out;
  out.reserve(infos.size());
  for (const auto& i : infos) out.push_back(i.mode);
  return out;
}

RowData compute_row(const Scenario& base, const ScanSpec& spec, double value) {
  RowData row;
  row.param = value;
  row.dressed.assign(spec.dressed_levels.size(), nan_v);

  Scenario s = with_parameter(base, spec.parameter, value);
  s.validate();
  const CrystalConfig cfg = s.crystal();
  EquilibriumResult eq;
  try {
    eq = equilibrium_positions(cfg);
  } catch (const std::exception& e) {
    row.flags.push_back("equilibrium_failed:" + sanitize(e.what()));
    return row;
  }
  const RotorProperties rp = s.rotor();
  const int ri = cfg.rotor_index();

  for (Direction d : {Direction::axial, Direction::radial}) {
    try {
      std::vector<NormalMode> modes = normal_modes(cfg, eq, d);
      classify_modes(cfg, modes);
      const CouplingForm form = d == Direction::axial ? CouplingForm::cosine
                                                      : CouplingForm::sine;
      std::vector<ModeInfo> infos;
      infos.reserve(modes.size());
      for (size_t p = 0; p < modes.size(); ++p) {
        ModeInfo mi;
        mi.mode = modes[p];
        const double field = field_scale(mi.mode, s.rotor_mass, ri);
        mi.g_hz = coupling_rate(field, s.dipole) / (2.0 * constants::pi);
        const double nu = mi.mode.nu();
        if (wants(spec, Observable::pt_shift)) {
          try {
            mi.pt_n0 = pt_shift_mode({0, 0}, nu, rp.B, mi.g_hz);
            mi.pt_n1 = pt_shift_mode({1, 0}, nu, rp.B, mi.g_hz);
          } catch (const resonance_error&) {
            row.flags.push_back(
                "resonant:" + local_name(d, mi.mode, static_cast<int>(p)));
          }
        }
        if (wants(spec, Observable::sideband_shift)) {
          try {
            ModeCoupling c;
            c.mode = mi.mode;
            c.form = form;
            c.g = 2.0 * constants::pi * mi.g_hz;
            mi.sideband = sideband_shift(c, rp.B, s.basis);
          } catch (const resonance_error&) {
            row.flags.push_back("sideband_resonant:" +
                                local_name(d, mi.mode, static_cast<int>(p)));
          }
        }
        infos.push_back(std::move(mi));
      }
      row.dir_modes[dir_index(d)] = std::move(infos);
    } catch (const instability_error&) {
      row.flags.push_back(std::string("unstable_") + to_string(d));
    } catch (const std::exception& e) {
      row.flags.push_back(std::string("modes_failed_") + to_string(d) + ":" +
                          sanitize(e.what()));
    }
  }

  if (wants(spec, Observable::dressed_eigenvalues)) {
    const auto& opt = row.dir_modes[dir_index(spec.dressed_direction)];
    const ModeInfo* target = nullptr;
    if (opt)
      for (const auto& mi : *opt)
        if (mi.mode.label == spec.dressed_branch) {
          target = &mi;
          break;
        }
    if (!target) {
      row.flags.push_back("dressed_branch_missing");
    } else {
      try {
        const CouplingForm form = spec.dressed_direction == Direction::axial
                                      ? CouplingForm::cosine
                                      : CouplingForm::sine;
        const DressedSpectrum ds = dressed_spectrum(
            target->mode.nu(), rp.B, target->g_hz, form, s.basis);
        bool missing = false;
        for (size_t k = 0; k < spec.dressed_levels.size(); ++k) {
          if (ds.has(spec.dressed_levels[k]))
            row.dressed[k] = ds.energy(spec.dressed_levels[k]);
          else
            missing = true;
        }
        if (missing) row.flags.push_back("dressed_level_missing");
        if (ds.strongly_mixed) row.flags.push_back("strongly_mixed");
      } catch (const std::exception& e) {
        row.flags.push_back("dressed_failed:" + sanitize(e.what()));
      }
    }
  }
  return row;
}

std::string level_suffix(ProductLabel s) {
  std::string l = s.l < 0 ? "m" + std::to_string(-s.l) : std::to_string(s.l);
  return std::to_string(s.n) + "_" + l;
}

}  // namespace

ScanTable run_scan(const Scenario& base, const ScanSpec& spec, int threads) {
  base.validate();
  spec.validate();

  const size_t nrows = spec.grid.size();
  std::vector<RowData> rows(nrows);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= nrows) return;
      try {
        rows[k] = compute_row(base, spec, spec.grid[k]);
      } catch (const std::exception& e) {
        rows[k] = RowData{};
        rows[k].param = spec.grid[k];
        rows[k].dressed.assign(spec.dressed_levels.size(), nan_v);
        rows[k].flags.push_back("error:" + sanitize(e.what()));
      }
    }
  };
  const int nthreads =
      std::min<int>(resolve_threads(threads), static_cast<int>(nrows));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Branch identity: named at the first computable row of each direction,
  // then continued row to row by eigenvector overlap.
  const int nper = 2 * base.count_per_side + 1;
  struct DirTrack {
    std::vector<std::string> names;
    std::vector<std::vector<int>> perm;  // [row][branch] -> mode index or -1
  };
  std::array<DirTrack, 2> tracks;
  for (int d = 0; d < 2; ++d) {
    DirTrack& tk = tracks[d];
    tk.perm.assign(nrows, std::vector<int>(nper, -1));
    tk.names.resize(nper);
    const char* dname = d == 0 ? "axial" : "radial";

    int first = -1;
    for (size_t r = 0; r < nrows; ++r)
      if (rows[r].dir_modes[d]) {
        first = static_cast<int>(r);
        break;
      }
    if (first < 0) {
      for (int p = 0; p < nper; ++p)
        tk.names[p] = std::string(dname) + "_m" + std::to_string(p);
      continue;
    }

    const std::vector<ModeInfo>& fm = *rows[first].dir_modes[d];
    bool use_labels = true;
    for (const auto& mi : fm)
      if (mi.mode.label == ModeLabel::unlabeled) use_labels = false;
    for (int p = 0; p < nper; ++p)
      tk.names[p] = use_labels
                        ? std::string(dname) + "_" + to_string(fm[p].mode.label)
                        : std::string(dname) + "_m" + std::to_string(p);

    std::vector<int> prev_perm(nper);
    for (int p = 0; p < nper; ++p) prev_perm[p] = p;
    tk.perm[first] = prev_perm;
    std::vector<NormalMode> prev_modes = to_modes(fm);
    for (size_t r = first + 1; r < nrows; ++r) {
      if (!rows[r].dir_modes[d]) continue;
      const std::vector<NormalMode> cur = to_modes(*rows[r].dir_modes[d]);
      const TrackResult tr = track_branches(prev_modes, cur);
      for (int p = 0; p < nper; ++p) tk.perm[r][p] = tr.map[prev_perm[p]];
      if (tr.ambiguous)
        rows[r].flags.push_back(std::string("ambiguous_tracking_") + dname);
      prev_perm = tk.perm[r];
      prev_modes = cur;
    }
  }

  // Column layout: observable groups in canonical order, branches axial
  // before radial within each group.
  ScanTable table;
  table.param_name = to_string(spec.parameter);
  table.param = spec.grid;

  enum class Kind { freq, coupling, pt_n0, pt_n1, sideband, bcomp, dressed };
  struct ColDef {
    Kind kind;
    int dir = 0, branch = 0, elem = 0;
  };
  std::vector<ColDef> defs;
  auto add_branch_cols = [&](Kind kind, const std::string& suffix) {
    for (int d = 0; d < 2; ++d)
      for (int p = 0; p < nper; ++p) {
        defs.push_back({kind, d, p, 0});
        table.columns.push_back(tracks[d].names[p] + suffix);
      }
  };
  for (Observable o :
       {Observable::mode_freqs, Observable::coupling, Observable::pt_shift,
        Observable::sideband_shift, Observable::eigenvectors,
        Observable::dressed_eigenvalues}) {
    if (!wants(spec, o)) continue;
    switch (o) {
      case Observable::mode_freqs:
        add_branch_cols(Kind::freq, "_freq_hz");
        break;
      case Observable::coupling:
        add_branch_cols(Kind::coupling, "_coupling_hz");
        break;
      case Observable::pt_shift:
        add_branch_cols(Kind::pt_n0, "_pt_n0_hz");
        add_branch_cols(Kind::pt_n1, "_pt_n1_hz");
        break;
      case Observable::sideband_shift:
        add_branch_cols(Kind::sideband, "_sideband_hz");
        break;
      case Observable::eigenvectors:
        for (int d = 0; d < 2; ++d)
          for (int p = 0; p < nper; ++p)
            for (int i = 0; i < nper; ++i) {
              defs.push_back({Kind::bcomp, d, p, i});
              table.columns.push_back(tracks[d].names[p] + "_b" +
                                      std::to_string(i));
            }
        break;
      case Observable::dressed_eigenvalues:
        for (size_t k = 0; k < spec.dressed_levels.size(); ++k) {
          defs.push_back({Kind::dressed, 0, 0, static_cast<int>(k)});
          table.columns.push_back("dressed_" +
                                  level_suffix(spec.dressed_levels[k]) + "_hz");
        }
        break;
    }
  }

  table.values.assign(nrows, std::vector<double>(defs.size(), nan_v));
  for (size_t r = 0; r < nrows; ++r) {
    for (size_t c = 0; c < defs.size(); ++c) {
      const ColDef& def = defs[c];
      double v = nan_v;
      if (def.kind == Kind::dressed) {
        v = rows[r].dressed[def.elem];
      } else {
        const auto& opt = rows[r].dir_modes[def.dir];
        const int idx = tracks[def.dir].perm[r][def.branch];
        if (opt && idx >= 0) {
          const ModeInfo& mi = (*opt)[idx];
          switch (def.kind) {
            case Kind::freq:     v = mi.mode.nu(); break;
            case Kind::coupling: v = mi.g_hz; break;
            case Kind::pt_n0:    v = mi.pt_n0; break;
            case Kind::pt_n1:    v = mi.pt_n1; break;
            case Kind::sideband: v = mi.sideband; break;
            case Kind::bcomp:    v = mi.mode.b[def.elem]; break;
            default: break;
          }
        }
      }
      table.values[r][c] = v;
    }
  }

  table.flags.resize(nrows);
  for (size_t r = 0; r < nrows; ++r) {
    if (rows[r].flags.empty()) {
      table.flags[r] = "ok";
      continue;
    }
    std::string joined;
    for (size_t k = 0; k < rows[r].flags.size(); ++k) {
      if (k) joined += ";";
      joined += rows[r].flags[k];
    }
    table.flags[r] = joined;
  }
  return table;
}

GapResult avoided_crossing_gap(const ScanTable& table,
                               const std::string& column_a,
                               const std::string& column_b) {
  const int ia = table.column_index(column_a);
  const int ib = table.column_index(column_b);
  if (ia < 0 || ib < 0)
    throw validation_error("avoided-crossing columns not found in table");

  std::vector<double> x, gap;
  for (size_t r = 0; r < table.param.size(); ++r) {
    const double a = table.values[r][ia];
    const double b = table.values[r][ib];
    if (std::isnan(a) || std::isnan(b)) continue;
    x.push_back(table.param[r]);
    gap.push_back(std::abs(a - b));
  }
  GapResult res;
  if (x.size() < 3) {
    res.reason = "fewer than 3 valid rows";
    return res;
  }

  double gmin = gap[0], gmax = gap[0];
  size_t kmin = 0;
  for (size_t k = 1; k < gap.size(); ++k) {
    if (gap[k] < gmin) {
      gmin = gap[k];
      kmin = k;
    }
    gmax = std::max(gmax, gap[k]);
  }
  if (gmax <= 0.0 || (gmax - gmin) <= 1e-12 * gmax) {
    res.reason = "branches run parallel over the whole grid";
    return res;
  }
  if (kmin == 0 || kmin == gap.size() - 1) {
    res.reason = "closest approach at the grid boundary";
    return res;
  }

  // Three-point parabola around the sampled minimum.
  const double x0 = x[kmin - 1], x1 = x[kmin], x2 = x[kmin + 1];
  const double g0 = gap[kmin - 1], g1 = gap[kmin], g2 = gap[kmin + 1];
  const double d01 = (g1 - g0) / (x1 - x0);
  const double d12 = (g2 - g1) / (x2 - x1);
  const double c2 = (d12 - d01) / (x2 - x0);  // half the curvature
  if (!(c2 > 0.0)) {
    res.reason = "no convex minimum at the closest approach";
    return res;
  }
  // Newton form f(x) = g0 + d01 (x - x0) + c2 (x - x0)(x - x1);
  // the vertex solves f'(x) = d01 + c2 (2x - x0 - x1) = 0.
  double xv = 0.5 * (x0 + x1) - d01 / (2.0 * c2);
  xv = std::clamp(xv, x0, x2);
  const double gv = g0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
  res.found = true;
  res.location = xv;
  res.gap = std::max(gv, 0.0);
  return res;
}

ResonanceResult find_resonance(const Scenario& base, ScanParameter param,
                               Direction dir, ModeLabel branch, int l,
                               double lo, double hi) {
  base.validate();
  if (!(hi > lo)) throw validation_error("bracket needs lo < hi");
  if (l < 0) throw validation_error("rotor quantum number l must be >= 0");

  std::vector<NormalMode> ref_modes;
  int ref_idx = -1;

  struct Eval {
    double f;
    double nu;
    double target;
  };
  auto eval = [&](double xval) -> Eval {
    Scenario s = with_parameter(base, param, xval);
    s.validate();
    const CrystalConfig cfg = s.crystal();
    const EquilibriumResult eq = equilibrium_positions(cfg);
    std::vector<NormalMode> modes = normal_modes(cfg, eq, dir);
    classify_modes(cfg, modes);
    int idx;
    if (ref_modes.empty()) {
      idx = -1;
      for (size_t p = 0; p < modes.size(); ++p)
        if (modes[p].label == branch) idx = static_cast<int>(p);
      if (idx < 0)
        throw validation_error(std::string("branch '") + to_string(branch) +
                               "' not present at the bracket edge");
      ref_modes = modes;
      ref_idx = idx;
    } else {
      const TrackResult tr = track_branches(ref_modes, modes);
      idx = tr.map[ref_idx];
    }
    const double nu = modes[idx].nu();
    const double target = (2.0 * l + 1.0) * s.B();
    return {nu - target, nu, target};
  };

  const double tol_hz = 1.0;
  Eval elo = eval(lo);
  if (std::abs(elo.f) < tol_hz)
    return {lo, elo.nu, elo.target, elo.f, 0};
  Eval ehi = eval(hi);
  if (std::abs(ehi.f) < tol_hz)
    return {hi, ehi.nu, ehi.target, ehi.f, 0};
  if ((elo.f > 0.0) == (ehi.f > 0.0)) {
    std::ostringstream msg;
    msg << "no resonance in bracket [" << lo << ", " << hi
        << "]: residual keeps sign (" << elo.f << " Hz to " << ehi.f << " Hz)";
    throw bracket_error(msg.str());
  }

  double a = lo, b = hi;
  double fa = elo.f;
  for (int it = 1; it <= 200; ++it) {
    const double mid = 0.5 * (a + b);
    const Eval em = eval(mid);
    if (std::abs(em.f) < tol_hz)
      return {mid, em.nu, em.target, em.f, it};
    if ((em.f > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = em.f;
    } else {
      b = mid;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(a), std::abs(b)))
      throw numerical_error(
          "resonance bracket collapsed before reaching the 1 Hz residual");
  }
  throw numerical_error("resonance bisection exceeded its iteration budget");
}

}  // namespace rotorphonon
