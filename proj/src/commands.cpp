#include "rotorphonon/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

namespace rotorphonon {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string version_string() {
#ifdef ROTORPHONON_VERSION
  return ROTORPHONON_VERSION;
#else
  return "unknown";
#endif
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string branch_name(Direction d, const NormalMode& m, int idx) {
  std::string s = to_string(d);
  s += "_";
  if (m.label != ModeLabel::unlabeled)
    s += to_string(m.label);
  else
    s += "m" + std::to_string(idx);
  return s;
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json mode_entry(Direction d, const NormalMode& m, int idx,
                        const ModeCoupling& c) {
  ordered_json e;
  e["branch"] = branch_name(d, m, idx);
  e["freq_hz"] = m.nu();
  e["parity"] = to_string(m.parity);
  e["b"] = m.b;
  e["field_v_per_m"] = c.field;
  e["coupling_hz"] = c.g_hz();
  return e;
}

}  // namespace

ordered_json ResultEnvelope::to_json() const {
  ordered_json j;
  j["version"] = version;
  j["command"] = command;
  j["config"] = config;
  j["payload"] = payload;
  return j;
}

std::pair<Direction, ModeLabel> parse_branch(const std::string& name) {
  std::string rest = name;
  std::optional<Direction> dir;
  if (name.rfind("axial_", 0) == 0) {
    dir = Direction::axial;
    rest = name.substr(6);
  } else if (name.rfind("radial_", 0) == 0) {
    dir = Direction::radial;
    rest = name.substr(7);
  }
  ModeLabel label;
  if (rest == "com") label = ModeLabel::com;
  else if (rest == "breathing") label = ModeLabel::breathing;
  else if (rest == "egyptian") label = ModeLabel::egyptian;
  else if (rest == "rocking") label = ModeLabel::rocking;
  else if (rest == "zigzag") label = ModeLabel::zigzag;
  else
    throw validation_error(
        "unknown branch '" + name +
        "'; expected com/breathing/egyptian/rocking/zigzag with optional "
        "axial_/radial_ prefix");
  if (!dir) {
    switch (label) {
      case ModeLabel::breathing:
      case ModeLabel::egyptian:
        dir = Direction::axial;
        break;
      case ModeLabel::rocking:
      case ModeLabel::zigzag:
        dir = Direction::radial;
        break;
      default:
        throw validation_error(
            "branch 'com' exists in both directions; use axial_com or "
            "radial_com");
    }
  }
  const bool axial_label = label == ModeLabel::com ||
                           label == ModeLabel::breathing ||
                           label == ModeLabel::egyptian;
  const bool radial_label = label == ModeLabel::com ||
                            label == ModeLabel::rocking ||
                            label == ModeLabel::zigzag;
  if ((*dir == Direction::axial && !axial_label) ||
      (*dir == Direction::radial && !radial_label))
    throw validation_error("branch '" + name +
                           "' pairs a label with the wrong direction");
  return {*dir, label};
}

ResultEnvelope cmd_modes(const RunConfig& cfg) {
  Stopwatch clock;
  const Scenario sc = cfg.scenario();
  sc.validate();
  const CrystalConfig crystal = sc.crystal();
  const ModeSet set = labeled_modes(crystal);
  const std::vector<ModeCoupling> couplings =
      build_couplings(set, crystal, sc.rotor());

  ResultEnvelope env;
  env.version = version_string();
  env.command = "modes";
  env.config = serialize_config(cfg);

  ordered_json payload;
  payload["length_scale_m"] = crystal.length_scale();
  payload["rot_const_hz"] = sc.B();
  payload["equilibrium"] = {{"z_m", set.equilibrium.z},
                            {"iterations", set.equilibrium.iterations},
                            {"residual_n", set.equilibrium.residual}};
  size_t ci = 0;
  for (Direction d : {Direction::axial, Direction::radial}) {
    ordered_json list = ordered_json::array();
    const auto& modes = set.modes(d);
    for (size_t p = 0; p < modes.size(); ++p, ++ci)
      list.push_back(
          mode_entry(d, modes[p], static_cast<int>(p), couplings[ci]));
    payload[to_string(d)] = std::move(list);
  }
  env.payload = std::move(payload);
  env.wall_ms = clock.ms();
  return env;
}

ResultEnvelope cmd_spectrum(const RunConfig& cfg, const std::string& branch) {
  Stopwatch clock;
  const auto [dir, label] = parse_branch(branch);
  const Scenario sc = cfg.scenario();
  sc.validate();
  const CrystalConfig crystal = sc.crystal();
  const ModeSet set = labeled_modes(crystal);

  const NormalMode* mode = nullptr;
  int idx = 0;
  for (size_t p = 0; p < set.modes(dir).size(); ++p)
    if (set.modes(dir)[p].label == label) {
      mode = &set.modes(dir)[p];
      idx = static_cast<int>(p);
    }
  if (!mode)
    throw validation_error("branch '" + branch +
                           "' is not present in this crystal");

  const RotorProperties rotor = sc.rotor();
  const double field = field_scale(*mode, sc.rotor_mass, crystal.rotor_index());
  const double g_hz =
      coupling_rate(field, sc.dipole) / (2.0 * constants::pi);
  const CouplingForm form =
      dir == Direction::axial ? CouplingForm::cosine : CouplingForm::sine;
  const DressedSpectrum ds =
      dressed_spectrum(mode->nu(), rotor.B, g_hz, form, sc.basis);

  ResultEnvelope env;
  env.version = version_string();
  env.command = "spectrum";
  env.config = serialize_config(cfg);

  ordered_json payload;
  payload["branch"] = branch_name(dir, *mode, idx);
  payload["freq_hz"] = mode->nu();
  payload["rot_const_hz"] = rotor.B;
  payload["coupling_hz"] = g_hz;
  payload["basis"] = {{"n_max", sc.basis.n_max}, {"l_max", sc.basis.l_max}};
  payload["strongly_mixed"] = ds.strongly_mixed;
  ordered_json states = ordered_json::array();
  for (size_t k = 0; k < ds.energies.size(); ++k) {
    states.push_back({{"energy_hz", ds.energies[k]},
                      {"n", ds.labels[k].n},
                      {"l", ds.labels[k].l},
                      {"overlap", ds.overlaps[k]}});
  }
  payload["states"] = std::move(states);
  env.payload = std::move(payload);
  env.wall_ms = clock.ms();
  return env;
}

ResultEnvelope cmd_shift(const RunConfig& cfg, ShiftMethod method) {
  Stopwatch clock;
  const Scenario sc = cfg.scenario();
  sc.validate();
  const CrystalConfig crystal = sc.crystal();
  const ModeSet set = labeled_modes(crystal);
  const RotorProperties rotor = sc.rotor();
  const std::vector<ModeCoupling> couplings =
      build_couplings(set, crystal, rotor);

  ResultEnvelope env;
  env.version = version_string();
  env.command = "shift";
  env.config = serialize_config(cfg);

  ordered_json payload;
  payload["method"] =
      method == ShiftMethod::perturbative ? "perturbative" : "exact";
  payload["rot_const_hz"] = rotor.B;
  ordered_json modes = ordered_json::array();
  double total_n0 = 0.0;
  bool total_ok = true;
  size_t ci = 0;
  for (Direction d : {Direction::axial, Direction::radial}) {
    for (size_t p = 0; p < set.modes(d).size(); ++p, ++ci) {
      const ModeCoupling& c = couplings[ci];
      ordered_json e;
      e["branch"] = branch_name(d, c.mode, static_cast<int>(p));
      e["freq_hz"] = c.mode.nu();
      e["coupling_hz"] = c.g_hz();
      std::vector<std::string> notes;
      try {
        e["sideband_shift_hz"] = sideband_shift(c, rotor.B, sc.basis, method);
      } catch (const resonance_error&) {
        e["sideband_shift_hz"] = nullptr;
        notes.push_back("resonant");
      }
      try {
        const double s0 = pt_shift_mode({0, 0}, c.mode.nu(), rotor.B, c.g_hz());
        e["pt_n0_hz"] = s0;
        e["pt_n1_hz"] = pt_shift_mode({1, 0}, c.mode.nu(), rotor.B, c.g_hz());
        total_n0 += s0;
      } catch (const resonance_error&) {
        e["pt_n0_hz"] = nullptr;
        e["pt_n1_hz"] = nullptr;
        if (notes.empty()) notes.push_back("resonant");
        total_ok = false;
      }
      e["notes"] = notes;
      modes.push_back(std::move(e));
    }
  }
  payload["modes"] = std::move(modes);
  if (total_ok)
    payload["total_pt_n0_hz"] = total_n0;
  else
    payload["total_pt_n0_hz"] = nullptr;
  env.payload = std::move(payload);
  env.wall_ms = clock.ms();
  return env;
}

ResultEnvelope cmd_scan(const RunConfig& cfg, int threads, ScanTable* out) {
  Stopwatch clock;
  const ScanTable table = run_scan(cfg.scenario(), cfg.scan_spec(), threads);
  if (out) *out = table;

  ResultEnvelope env;
  env.version = version_string();
  env.command = "scan";
  env.config = serialize_config(cfg);
  env.payload = table_to_json(table);
  env.wall_ms = clock.ms();
  return env;
}

ResultEnvelope cmd_resonance(const RunConfig& cfg, const std::string& branch,
                             int l, double lo, double hi, ScanParameter param) {
  Stopwatch clock;
  const auto [dir, label] = parse_branch(branch);
  const ResonanceResult r =
      find_resonance(cfg.scenario(), param, dir, label, l, lo, hi);

  ResultEnvelope env;
  env.version = version_string();
  env.command = "resonance";
  env.config = serialize_config(cfg);
  env.payload = {{"parameter", to_string(param)},
                 {"branch", branch},
                 {"l", l},
                 {"bracket", {lo, hi}},
                 {"root", r.param},
                 {"branch_freq_hz", r.branch_nu},
                 {"target_hz", r.target},
                 {"residual_hz", r.residual},
                 {"iterations", r.iterations}};
  env.wall_ms = clock.ms();
  return env;
}

std::string table_to_csv(const ScanTable& table) {
  std::string out = "param";
  for (const auto& c : table.columns) {
    out += ",";
    out += c;
  }
  out += ",flags\n";
  for (size_t r = 0; r < table.param.size(); ++r) {
    out += fmt17(table.param[r]);
    for (size_t c = 0; c < table.columns.size(); ++c) {
      out += ",";
      out += fmt17(table.values[r][c]);
    }
    out += ",";
    out += table.flags[r];
    out += "\n";
  }
  return out;
}

ordered_json table_to_json(const ScanTable& table) {
  ordered_json j;
  j["param_name"] = table.param_name;
  j["param"] = table.param;
  j["columns"] = table.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.values) rows.push_back(row);
  j["values"] = std::move(rows);
  j["flags"] = table.flags;
  return j;
}

ScanTable table_from_json(const json& j) {
  ScanTable t;
  try {
    t.param_name = j.at("param_name").get<std::string>();
    t.param = j.at("param").get<std::vector<double>>();
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.flags = j.at("flags").get<std::vector<std::string>>();
    for (const auto& row : j.at("values")) {
      std::vector<double> vals;
      vals.reserve(row.size());
      for (const auto& v : row)
        vals.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : v.get<double>());
      t.values.push_back(std::move(vals));
    }
  } catch (const json::exception& e) {
    throw validation_error(std::string("malformed table JSON: ") + e.what());
  }
  if (t.values.size() != t.param.size() ||
      t.flags.size() != t.param.size())
    throw validation_error("table JSON rows do not line up");
  for (const auto& row : t.values)
    if (row.size() != t.columns.size())
      throw validation_error("table JSON rows do not line up");
  return t;
}

void write_result(const ResultEnvelope& env, const ScanTable* table,
                  const std::string& format,
                  const std::optional<std::string>& path) {
  std::string text;
  if (format == "csv" && table) {
    text = table_to_csv(*table);
  } else if (format == "csv" || format == "json") {
    text = env.to_json().dump(2);
    text += "\n";
  } else {
    throw validation_error("unknown output format '" + format + "'");
  }
  if (path && !path->empty()) {
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw io_error("cannot open output path: " + *path);
    out << text;
    out.flush();
    if (!out) throw io_error("failed writing output to: " + *path);
  } else {
    std::cout << text;
  }
}

}  // namespace rotorphonon
