#pragma once
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotorphonon/scan.hpp"
#include "rotorphonon/scenario.hpp"

namespace rotorphonon {

// Scan section as written by the user: either an explicit grid or a
// min/max/steps/spacing recipe.
struct ScanSection {
  ScanParameter parameter = ScanParameter::rotor_mass;
  std::optional<std::vector<double>> grid;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> steps;
  GridSpacing spacing = GridSpacing::linear;
  std::vector<Observable> observables;
  Direction dressed_direction = Direction::axial;
  ModeLabel dressed_branch = ModeLabel::egyptian;
  std::vector<ProductLabel> dressed_levels = {
      {0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {2, 0}};

  bool operator==(const ScanSection&) const = default;
};

// Full run configuration in user units (u, debye, Hz, angstrom). Defaults are
// filled at parse time so a round trip through serialize_config is stable.
struct RunConfig {
  double nu_z_hz = 0.0;
  double nu_y_hz = 0.0;
  RadialScaling radial_scaling = RadialScaling::pseudopotential;

  double atom_mass_u = 0.0;
  int atom_charge_e = 1;
  int count_per_side = 1;

  double rotor_mass_u = 0.0;
  int rotor_charge_e = 1;
  double dipole_debye = 0.0;
  std::optional<double> b_hz;
  std::optional<double> sphere_radius_angstrom;

  int n_max = 10;
  int l_max = 15;

  std::optional<ScanSection> scan;

  std::string format = "csv";
  std::optional<std::string> out_path;

  bool operator==(const RunConfig&) const = default;

  Scenario scenario() const;
  ScanSpec scan_spec() const;  // throws when no scan section is present
};

// Strict parse: unknown keys anywhere are errors, and every violation is
// reported in one validation_error.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// Canonical echo of the configuration, defaults filled, fixed key order.
nlohmann::ordered_json serialize_config(const RunConfig& cfg);

}  // namespace rotorphonon
