#include "rotorphonon/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rotorphonon {

double bare_energy(ProductLabel s, double mode_nu, double B) {
  return mode_nu * (s.n + 0.5) + B * static_cast<double>(s.l) * s.l;
}

Eigen::MatrixXd build_single_mode_hamiltonian(double mode_nu, double B,
                                              double g_hz, CouplingForm form,
                                              const BasisTruncation& t) {
  if (t.n_max < 0 || t.l_max < 0)
    throw validation_error("basis truncation must be non-negative");
  const int dim = t.dimension();
  const std::vector<double> h = single_mode_matrix<double>(mode_nu, B, g_hz,
                                                           form, t);
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = h[static_cast<size_t>(i) * dim + j];
  return m;
}

namespace {

// Bare reference state for a label: at most two basis amplitudes.
struct BareRef {
  ProductLabel label;
  int idx_a = 0;
  int idx_b = -1;       // second component for l != 0 parity combos
  double amp_a = 1.0;
  double amp_b = 0.0;
};

BareRef make_ref(ProductLabel s, const BasisTruncation& t) {
  BareRef r;
  r.label = s;
  if (s.l == 0) {
    r.idx_a = t.index(s.n, 0);
    return r;
  }
  const int la = std::abs(s.l);
  const double inv = 1.0 / std::sqrt(2.0);
  r.idx_a = t.index(s.n, la);
  r.idx_b = t.index(s.n, -la);
  r.amp_a = inv;
  r.amp_b = s.l > 0 ? inv : -inv;  // +l names the symmetric combination
  return r;
}

double squared_overlap(const BareRef& r, const Eigen::MatrixXd& vectors,
                       int column) {
  double v = r.amp_a * vectors(r.idx_a, column);
  if (r.idx_b >= 0) v += r.amp_b * vectors(r.idx_b, column);
  return v * v;
}

// Greedy bijection between bare references and dressed columns by descending
// squared overlap; ties toward the lower bare basis index, then the lower
// dressed index. Returns, per reference, the assigned column and overlap.
struct Assignment {
  std::vector<int> column;
  std::vector<double> overlap2;
};

Assignment assign_labels(const std::vector<BareRef>& refs,
                         const Eigen::MatrixXd& vectors,
                         const BasisTruncation& t) {
  const int dim = static_cast<int>(vectors.cols());
  const int nref = static_cast<int>(refs.size());
  struct Cand {
    double o2;
    int bare_order;
    int ref;
    int col;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>(nref) * dim);
  for (int k = 0; k < nref; ++k) {
    const int order = t.index(refs[k].label.n, refs[k].label.l);
    for (int c = 0; c < dim; ++c)
      cands.push_back({squared_overlap(refs[k], vectors, c), order, k, c});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.o2 != b.o2) return a.o2 > b.o2;
    if (a.bare_order != b.bare_order) return a.bare_order < b.bare_order;
    return a.col < b.col;
  });
  Assignment out;
  out.column.assign(nref, -1);
  out.overlap2.assign(nref, 0.0);
  std::vector<bool> taken(dim, false);
  int done = 0;
  for (const Cand& c : cands) {
    if (done == nref) break;
    if (out.column[c.ref] != -1 || taken[c.col]) continue;
    out.column[c.ref] = c.col;
    taken[c.col] = true;
    out.overlap2[c.ref] = c.o2;
    ++done;
  }
  return out;
}

}  // namespace

bool DressedSpectrum::has(ProductLabel s) const {
  return std::find(labels.begin(), labels.end(), s) != labels.end();
}

double DressedSpectrum::energy(ProductLabel s) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == s) return energies[i];
  std::ostringstream msg;
  msg << "no dressed state labeled (n=" << s.n << ", l=" << s.l << ")";
  throw validation_error(msg.str());
}

double DressedSpectrum::overlap(ProductLabel s) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == s) return overlaps[i];
  std::ostringstream msg;
  msg << "no dressed state labeled (n=" << s.n << ", l=" << s.l << ")";
  throw validation_error(msg.str());
}

DressedSpectrum dressed_spectrum(double mode_nu, double B, double g_hz,
                                 CouplingForm form, const BasisTruncation& t) {
  if (!(mode_nu > 0.0) || !(B > 0.0))
    throw validation_error("dressed spectrum needs positive mode_nu and B");
  const Eigen::MatrixXd h = build_single_mode_hamiltonian(mode_nu, B, g_hz,
                                                          form, t);
  const EigenResult eg = symmetric_eigen(h);
  const int dim = t.dimension();

  std::vector<BareRef> refs;
  refs.reserve(dim);
  for (int n = 0; n <= t.n_max; ++n)
    for (int l = -t.l_max; l <= t.l_max; ++l)
      refs.push_back(make_ref({n, l}, t));

  const Assignment asg = assign_labels(refs, eg.vectors, t);

  DressedSpectrum out;
  out.trunc = t;
  out.energies.resize(dim);
  out.labels.resize(dim);
  out.overlaps.resize(dim);
  for (int i = 0; i < dim; ++i) out.energies[i] = eg.values(i);
  for (int k = 0; k < dim; ++k) {
    const int col = asg.column[k];
    out.labels[col] = refs[k].label;
    out.overlaps[col] = asg.overlap2[k];
    if (asg.overlap2[k] < 0.5) out.strongly_mixed = true;
  }
  return out;
}

double pt_shift_mode(ProductLabel s, double mode_nu, double B, double g_hz,
                     double eps_res_hz) {
  if (s.n < 0) throw validation_error("phonon occupation must be >= 0");
  const double g2 = g_hz * g_hz;
  const double up = (2.0 * s.l + 1.0) * B;    // l -> l+1 rotor energy cost
  const double down = (2.0 * s.l - 1.0) * B;  // l -> l-1
  const double num_up = s.n + 1.0;            // phonon emission
  const double num_dn = static_cast<double>(s.n);

  double shift = 0.0;
  const double dens[4] = {-mode_nu - up, -mode_nu + down, mode_nu - up,
                          mode_nu + down};
  const double nums[4] = {num_up, num_up, num_dn, num_dn};
  for (int k = 0; k < 4; ++k) {
    if (nums[k] == 0.0) continue;  // closed channel, no term at all
    if (std::abs(dens[k]) < eps_res_hz) {
      std::ostringstream msg;
      msg << "perturbative shift within " << eps_res_hz
          << " Hz of a resonance (denominator " << dens[k] << " Hz for state n="
          << s.n << ", l=" << s.l << ")";
      throw resonance_error(msg.str());
    }
    shift += g2 * nums[k] / dens[k];
  }
  return shift;
}

double pt_shift_total(const std::vector<int>& occupation, int l,
                      const std::vector<ModeCoupling>& couplings, double B,
                      double eps_res_hz) {
  if (occupation.size() != couplings.size())
    throw validation_error("occupation list does not match mode count");
  double total = 0.0;
  for (size_t p = 0; p < couplings.size(); ++p)
    total += pt_shift_mode({occupation[p], l}, couplings[p].mode.nu(), B,
                           couplings[p].g_hz(), eps_res_hz);
  return total;
}

double resonant_splitting_two_level(int n, double g_hz) {
  if (n < 1)
    throw validation_error("resonant splitting needs n >= 1; n = 0 has no "
                           "partner state");
  return std::abs(g_hz) * std::sqrt(static_cast<double>(n));
}

double resonant_splitting_l0(int n, double g_hz) {
  if (n < 1)
    throw validation_error("resonant splitting needs n >= 1; n = 0 has no "
                           "partner state");
  return std::abs(g_hz) * std::sqrt(2.0 * n);
}

double sideband_shift(const ModeCoupling& c, double B, const BasisTruncation& t,
                      ShiftMethod method) {
  const double nu = c.mode.nu();
  const double g = c.g_hz();
  if (method == ShiftMethod::perturbative)
    return pt_shift_mode({1, 0}, nu, B, g) - pt_shift_mode({0, 0}, nu, B, g);
  const DressedSpectrum ds = dressed_spectrum(nu, B, g, c.form, t);
  return ds.energy({1, 0}) - ds.energy({0, 0}) - nu;
}

namespace {

// Energies of the target labels only, via restricted greedy assignment.
std::vector<double> target_energies(double mode_nu, double B, double g_hz,
                                    CouplingForm form, const BasisTruncation& t,
                                    const std::vector<ProductLabel>& targets) {
  const Eigen::MatrixXd h = build_single_mode_hamiltonian(mode_nu, B, g_hz,
                                                          form, t);
  const EigenResult eg = symmetric_eigen(h);
  std::vector<BareRef> refs;
  refs.reserve(targets.size());
  for (ProductLabel s : targets) refs.push_back(make_ref(s, t));
  const Assignment asg = assign_labels(refs, eg.vectors, t);
  std::vector<double> out(targets.size());
  for (size_t k = 0; k < targets.size(); ++k)
    out[k] = eg.values(asg.column[k]);
  return out;
}

}  // namespace

BasisTruncation convergence_check(double mode_nu, double B, double g_hz,
                                  CouplingForm form, BasisTruncation start,
                                  const std::vector<ProductLabel>& targets,
                                  double tol_hz, int dim_cap) {
  if (targets.empty())
    throw validation_error("convergence check needs at least one target state");
  for (ProductLabel s : targets)
    if (!start.contains(s.n, s.l))
      throw validation_error("target state outside the starting truncation");

  auto guarded = [&](const BasisTruncation& t) {
    if (t.dimension() > dim_cap) {
      std::ostringstream msg;
      msg << "basis growth hit the size cap: dimension " << t.dimension()
          << " exceeds " << dim_cap << " before eigenvalues settled";
      throw nonconvergence_error(msg.str());
    }
    return target_energies(mode_nu, B, g_hz, form, t, targets);
  };

  BasisTruncation cur = start;
  std::vector<double> cur_vals = guarded(cur);
  for (int round = 0; round < 12; ++round) {
    const BasisTruncation next{2 * cur.n_max, 2 * cur.l_max};
    const std::vector<double> next_vals = guarded(next);
    double worst = 0.0;
    for (size_t k = 0; k < targets.size(); ++k)
      worst = std::max(worst, std::abs(next_vals[k] - cur_vals[k]));
    if (worst < tol_hz) return cur;
    cur = next;
    cur_vals = next_vals;
  }
  throw nonconvergence_error("eigenvalues did not settle after 12 doublings");
}

}  // namespace rotorphonon
