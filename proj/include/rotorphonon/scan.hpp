#pragma once
#include <optional>
#include <string>
#include <vector>

#include "rotorphonon/scenario.hpp"

namespace rotorphonon {

// Scan grids are in user units: rotor_mass in u, frequencies in Hz,
// dipole in debye.
enum class ScanParameter { rotor_mass, nu_z, nu_y, dipole, rot_const };
enum class GridSpacing { linear, log };
enum class Observable {
  mode_freqs,
  coupling,
  pt_shift,
  sideband_shift,
  eigenvectors,
  dressed_eigenvalues,
};

const char* to_string(ScanParameter p);
const char* to_string(GridSpacing s);
const char* to_string(Observable o);

std::vector<double> make_grid(double min, double max, int steps,
                              GridSpacing spacing);

struct ScanSpec {
  ScanParameter parameter = ScanParameter::rotor_mass;
  std::vector<double> grid;              // ascending, user units
  std::vector<Observable> observables;   // deduplicated, canonical order

  // Which mode the dressed-eigenvalue columns follow, and which states.
  Direction dressed_direction = Direction::axial;
  ModeLabel dressed_branch = ModeLabel::egyptian;
  std::vector<ProductLabel> dressed_levels = {
      {0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {2, 0}};

  void validate() const;
};

// Rectangular result table. Rows follow the grid; a value that could not be
// computed singly is NaN with an explanatory token in the row's flags.
struct ScanTable {
  std::string param_name;
  std::vector<double> param;
  std::vector<std::string> columns;           // excludes param and flags
  std::vector<std::vector<double>> values;    // [row][column]
  std::vector<std::string> flags;             // per row; "ok" when clean

  int column_index(const std::string& name) const;  // -1 when absent
};

// Scenario with one parameter replaced by a grid value (user units).
Scenario with_parameter(Scenario s, ScanParameter p, double value);

// Row-parallel scan. Branch identity within each direction is continued from
// the first computable row by eigenvector overlap; the output is independent
// of the thread count.
ScanTable run_scan(const Scenario& base, const ScanSpec& spec, int threads = 1);

// Number of worker threads: `requested` if positive, else the
// ROTORPHONON_THREADS environment variable, else the hardware concurrency.
int resolve_threads(int requested);

struct GapResult {
  bool found = false;
  double location = 0.0;  // parameter value of closest approach
  double gap = 0.0;       // refined minimum |freq_a - freq_b|, Hz
  std::string reason;     // why nothing was found, for diagnostics
};

// Closest-approach analysis of two frequency columns: locate the interior
// minimum of the gap and refine it with a three-point parabola. Parallel or
// diverging branches report not-found.
GapResult avoided_crossing_gap(const ScanTable& table,
                               const std::string& column_a,
                               const std::string& column_b);

struct ResonanceResult {
  double param = 0.0;      // root, user units
  double branch_nu = 0.0;  // Hz, branch frequency at the root
  double target = 0.0;     // Hz, (2l+1) B at the root
  double residual = 0.0;   // Hz, branch_nu - target
  int iterations = 0;
};

// Bisection for the parameter value where a labeled branch meets the rotor
// transition l -> l+1 (frequency (2l+1) B). The branch is identified by label
// at the lower bracket edge and followed by eigenvector overlap. Residual
// tolerance 1 Hz; a bracket without a sign change raises bracket_error.
ResonanceResult find_resonance(const Scenario& base, ScanParameter param,
                               Direction dir, ModeLabel branch, int l,
                               double lo, double hi);

}  // namespace rotorphonon
