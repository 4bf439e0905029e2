#include "rotorphonon/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rotorphonon {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Collects every violation before failing, so a bad config is reported whole.
class Checker {
 public:
  void fail(const std::string& path, const std::string& what) {
    errors_.push_back(path + ": " + what);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed)
        if (it.key() == a) ok = true;
      if (!ok) fail(path + "." + it.key(), "unknown key");
    }
  }

  const json* object(const json& parent, const char* key,
                     const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "missing required section");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(path + "." + key, "must be an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number(const json& obj, const char* key,
                               const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<double> positive(const json& obj, const char* key,
                                 const std::string& path, bool required) {
    auto v = number(obj, key, path, required);
    if (v && !(*v > 0.0)) {
      fail(path + "." + key, "must be > 0");
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> integer(const json& obj, const char* key,
                             const std::string& path, bool required,
                             int min_value) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "must be an integer");
      return std::nullopt;
    }
    const int n = v.get<int>();
    if (n < min_value) {
      fail(path + "." + key, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return n;
  }

  std::optional<std::string> text(const json& obj, const char* key,
                                  const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  void finish() const {
    if (errors_.empty()) return;
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& e : errors_) msg << "\n  - " << e;
    throw validation_error(msg.str());
  }

 private:
  std::vector<std::string> errors_;
};

template <class Enum>
std::optional<Enum> parse_enum(Checker& ck, const std::string& path,
                               const std::optional<std::string>& s,
                               std::initializer_list<std::pair<const char*, Enum>>
                                   table) {
  if (!s) return std::nullopt;
  for (const auto& [name, value] : table)
    if (*s == name) return value;
  std::string allowed;
  for (const auto& [name, value] : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += name;
  }
  ck.fail(path, "must be one of: " + allowed);
  return std::nullopt;
}

constexpr std::initializer_list<std::pair<const char*, Observable>>
    observable_names = {
        {"mode_freqs", Observable::mode_freqs},
        {"coupling", Observable::coupling},
        {"pt_shift", Observable::pt_shift},
        {"sideband_shift", Observable::sideband_shift},
        {"eigenvectors", Observable::eigenvectors},
        {"dressed_eigenvalues", Observable::dressed_eigenvalues},
};

}  // namespace

Scenario RunConfig::scenario() const {
  Scenario s;
  s.atom_mass = atom_mass_u * constants::amu;
  s.atom_charge = atom_charge_e;
  s.count_per_side = count_per_side;
  s.rotor_mass = rotor_mass_u * constants::amu;
  s.rotor_charge = rotor_charge_e;
  s.dipole = dipole_debye * constants::debye;
  s.b_hz = b_hz;
  if (sphere_radius_angstrom)
    s.sphere_radius = *sphere_radius_angstrom * 1e-10;
  s.nu_z = nu_z_hz;
  s.nu_y = nu_y_hz;
  s.radial_scaling = radial_scaling;
  s.basis = BasisTruncation{n_max, l_max};
  return s;
}

ScanSpec RunConfig::scan_spec() const {
  if (!scan) throw validation_error("configuration has no scan section");
  ScanSpec spec;
  spec.parameter = scan->parameter;
  if (scan->grid)
    spec.grid = *scan->grid;
  else
    spec.grid = make_grid(*scan->min, *scan->max, *scan->steps, scan->spacing);
  spec.observables = scan->observables;
  spec.dressed_direction = scan->dressed_direction;
  spec.dressed_branch = scan->dressed_branch;
  spec.dressed_levels = scan->dressed_levels;
  return spec;
}

RunConfig parse_config(const json& j) {
  Checker ck;
  RunConfig cfg;

  if (!j.is_object()) {
    ck.fail("config", "top level must be a JSON object");
    ck.finish();
  }
  ck.check_keys(j, "config",
                {"trap", "atoms", "rotor", "basis", "scan", "output"});

  if (const json* trap = ck.object(j, "trap", "config", true)) {
    ck.check_keys(*trap, "trap", {"nu_z_hz", "nu_y_hz", "radial_scaling"});
    if (auto v = ck.positive(*trap, "nu_z_hz", "trap", true)) cfg.nu_z_hz = *v;
    if (auto v = ck.positive(*trap, "nu_y_hz", "trap", true)) cfg.nu_y_hz = *v;
    if (auto v = parse_enum<RadialScaling>(
            ck, "trap.radial_scaling",
            ck.text(*trap, "radial_scaling", "trap", false),
            {{"pseudopotential", RadialScaling::pseudopotential},
             {"uniform", RadialScaling::uniform}}))
      cfg.radial_scaling = *v;
  }

  if (const json* atoms = ck.object(j, "atoms", "config", true)) {
    ck.check_keys(*atoms, "atoms", {"mass_u", "charge_e", "count_per_side"});
    if (auto v = ck.positive(*atoms, "mass_u", "atoms", true))
      cfg.atom_mass_u = *v;
    if (auto v = ck.integer(*atoms, "charge_e", "atoms", false, 1))
      cfg.atom_charge_e = *v;
    if (auto v = ck.integer(*atoms, "count_per_side", "atoms", false, 1))
      cfg.count_per_side = *v;
  }

  if (const json* rotor = ck.object(j, "rotor", "config", true)) {
    ck.check_keys(*rotor, "rotor",
                  {"mass_u", "charge_e", "dipole_debye", "b_hz", "sphere"});
    if (auto v = ck.positive(*rotor, "mass_u", "rotor", true))
      cfg.rotor_mass_u = *v;
    if (auto v = ck.integer(*rotor, "charge_e", "rotor", false, 1))
      cfg.rotor_charge_e = *v;
    if (auto v = ck.number(*rotor, "dipole_debye", "rotor", true)) {
      if (*v < 0.0)
        ck.fail("rotor.dipole_debye", "must be >= 0");
      else
        cfg.dipole_debye = *v;
    }
    const bool has_b = rotor->contains("b_hz");
    const bool has_sphere = rotor->contains("sphere");
    if (has_b == has_sphere)
      ck.fail("rotor", "exactly one of b_hz or sphere must be given");
    if (has_b)
      if (auto v = ck.positive(*rotor, "b_hz", "rotor", false)) cfg.b_hz = *v;
    if (has_sphere) {
      if (const json* sph = ck.object(*rotor, "sphere", "rotor", false)) {
        ck.check_keys(*sph, "rotor.sphere", {"radius_angstrom"});
        if (auto v = ck.positive(*sph, "radius_angstrom", "rotor.sphere", true))
          cfg.sphere_radius_angstrom = *v;
      }
    }
  }

  if (const json* basis = ck.object(j, "basis", "config", false)) {
    ck.check_keys(*basis, "basis", {"n_max", "l_max"});
    if (auto v = ck.integer(*basis, "n_max", "basis", false, 1)) cfg.n_max = *v;
    if (auto v = ck.integer(*basis, "l_max", "basis", false, 2)) cfg.l_max = *v;
  }

  if (const json* scan = ck.object(j, "scan", "config", false)) {
    ScanSection sec;
    ck.check_keys(*scan, "scan",
                  {"parameter", "grid", "min", "max", "steps", "spacing",
                   "observables", "dressed_direction", "dressed_branch",
                   "dressed_levels"});
    if (auto v = parse_enum<ScanParameter>(
            ck, "scan.parameter", ck.text(*scan, "parameter", "scan", true),
            {{"rotor_mass", ScanParameter::rotor_mass},
             {"nu_z", ScanParameter::nu_z},
             {"nu_y", ScanParameter::nu_y},
             {"dipole", ScanParameter::dipole},
             {"rot_const", ScanParameter::rot_const}}))
      sec.parameter = *v;

    const bool has_grid = scan->contains("grid");
    const bool has_recipe = scan->contains("min") || scan->contains("max") ||
                            scan->contains("steps") ||
                            scan->contains("spacing");
    if (has_grid == has_recipe)
      ck.fail("scan", "use either an explicit grid or min/max/steps, not both");
    if (has_grid) {
      const json& g = scan->at("grid");
      if (!g.is_array() || g.empty()) {
        ck.fail("scan.grid", "must be a non-empty array of numbers");
      } else {
        std::vector<double> grid;
        bool ok = true;
        for (const auto& v : g) {
          if (!v.is_number()) {
            ck.fail("scan.grid", "must contain only numbers");
            ok = false;
            break;
          }
          grid.push_back(v.get<double>());
        }
        if (ok) {
          for (size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0.0)) {
              ck.fail("scan.grid", "values must be > 0");
              ok = false;
              break;
            }
            if (i > 0 && !(grid[i] > grid[i - 1])) {
              ck.fail("scan.grid", "values must be strictly increasing");
              ok = false;
              break;
            }
          }
        }
        if (ok) sec.grid = std::move(grid);
      }
    } else if (has_recipe) {
      if (auto v = ck.positive(*scan, "min", "scan", true)) sec.min = *v;
      if (auto v = ck.positive(*scan, "max", "scan", true)) sec.max = *v;
      if (auto v = ck.integer(*scan, "steps", "scan", true, 2)) sec.steps = *v;
      if (auto v = parse_enum<GridSpacing>(
              ck, "scan.spacing", ck.text(*scan, "spacing", "scan", false),
              {{"linear", GridSpacing::linear}, {"log", GridSpacing::log}}))
        sec.spacing = *v;
      if (sec.min && sec.max && !(*sec.max > *sec.min))
        ck.fail("scan.max", "must be > scan.min");
      if (sec.min && sec.spacing == GridSpacing::log && !(*sec.min > 0.0))
        ck.fail("scan.min", "log spacing needs min > 0");
    }

    if (!scan->contains("observables")) {
      ck.fail("scan.observables", "missing required key");
    } else if (!scan->at("observables").is_array() ||
               scan->at("observables").empty()) {
      ck.fail("scan.observables", "must be a non-empty array");
    } else {
      std::vector<Observable> obs;
      for (const auto& v : scan->at("observables")) {
        std::optional<std::string> name;
        if (v.is_string()) name = v.get<std::string>();
        else ck.fail("scan.observables", "entries must be strings");
        if (auto o = parse_enum<Observable>(ck, "scan.observables", name,
                                            observable_names))
          obs.push_back(*o);
      }
      // Canonical order, duplicates dropped.
      std::sort(obs.begin(), obs.end());
      obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
      sec.observables = std::move(obs);
    }

    if (auto v = parse_enum<Direction>(
            ck, "scan.dressed_direction",
            ck.text(*scan, "dressed_direction", "scan", false),
            {{"axial", Direction::axial}, {"radial", Direction::radial}}))
      sec.dressed_direction = *v;
    if (auto v = parse_enum<ModeLabel>(
            ck, "scan.dressed_branch",
            ck.text(*scan, "dressed_branch", "scan", false),
            {{"com", ModeLabel::com},
             {"breathing", ModeLabel::breathing},
             {"egyptian", ModeLabel::egyptian},
             {"rocking", ModeLabel::rocking},
             {"zigzag", ModeLabel::zigzag}}))
      sec.dressed_branch = *v;
    if (scan->contains("dressed_levels")) {
      const json& lv = scan->at("dressed_levels");
      if (!lv.is_array() || lv.empty()) {
        ck.fail("scan.dressed_levels", "must be a non-empty array of [n, l]");
      } else {
        std::vector<ProductLabel> levels;
        for (const auto& v : lv) {
          if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
              !v[1].is_number_integer()) {
            ck.fail("scan.dressed_levels", "entries must be [n, l] integers");
            break;
          }
          const int n = v[0].get<int>(), l = v[1].get<int>();
          if (n < 0) {
            ck.fail("scan.dressed_levels", "n must be >= 0");
            break;
          }
          levels.push_back({n, l});
        }
        if (!levels.empty()) sec.dressed_levels = std::move(levels);
      }
    }
    cfg.scan = std::move(sec);
  }

  if (const json* output = ck.object(j, "output", "config", false)) {
    ck.check_keys(*output, "output", {"format", "path"});
    if (auto v = ck.text(*output, "format", "output", false)) {
      if (*v != "csv" && *v != "json")
        ck.fail("output.format", "must be one of: csv, json");
      else
        cfg.format = *v;
    }
    if (auto v = ck.text(*output, "path", "output", false)) cfg.out_path = *v;
  }

  ck.finish();

  // Cross-field checks that only make sense on a structurally valid config.
  cfg.scenario().validate();
  if (cfg.scan) {
    if (cfg.scan->grid) {
      ScanSpec probe = cfg.scan_spec();
      // grid contents were validated above; observable set checked here
      probe.validate();
    } else {
      make_grid(*cfg.scan->min, *cfg.scan->max, *cfg.scan->steps,
                cfg.scan->spacing);
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("config is not valid JSON: ") +
                           e.what());
  }
  return parse_config(j);
}

ordered_json serialize_config(const RunConfig& cfg) {
  ordered_json j;
  j["trap"] = {{"nu_z_hz", cfg.nu_z_hz},
               {"nu_y_hz", cfg.nu_y_hz},
               {"radial_scaling", to_string(cfg.radial_scaling)}};
  j["atoms"] = {{"mass_u", cfg.atom_mass_u},
                {"charge_e", cfg.atom_charge_e},
                {"count_per_side", cfg.count_per_side}};
  ordered_json rotor;
  rotor["mass_u"] = cfg.rotor_mass_u;
  rotor["charge_e"] = cfg.rotor_charge_e;
  rotor["dipole_debye"] = cfg.dipole_debye;
  if (cfg.b_hz) rotor["b_hz"] = *cfg.b_hz;
  if (cfg.sphere_radius_angstrom)
    rotor["sphere"] = {{"radius_angstrom", *cfg.sphere_radius_angstrom}};
  j["rotor"] = std::move(rotor);
  j["basis"] = {{"n_max", cfg.n_max}, {"l_max", cfg.l_max}};
  if (cfg.scan) {
    const ScanSection& s = *cfg.scan;
    ordered_json sc;
    sc["parameter"] = to_string(s.parameter);
    if (s.grid) {
      sc["grid"] = *s.grid;
    } else {
      sc["min"] = *s.min;
      sc["max"] = *s.max;
      sc["steps"] = *s.steps;
      sc["spacing"] = to_string(s.spacing);
    }
    ordered_json obs = ordered_json::array();
    for (Observable o : s.observables) obs.push_back(to_string(o));
    sc["observables"] = std::move(obs);
    sc["dressed_direction"] = to_string(s.dressed_direction);
    sc["dressed_branch"] = to_string(s.dressed_branch);
    ordered_json levels = ordered_json::array();
    for (ProductLabel p : s.dressed_levels)
      levels.push_back(ordered_json::array({p.n, p.l}));
    sc["dressed_levels"] = std::move(levels);
    j["scan"] = std::move(sc);
  }
  ordered_json out;
  out["format"] = cfg.format;
  if (cfg.out_path) out["path"] = *cfg.out_path;
  j["output"] = std::move(out);
  return j;
}

}  // namespace rotorphonon
