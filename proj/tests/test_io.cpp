#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "rotorphonon/commands.hpp"
#include "rotorphonon/config.hpp"

using namespace rotorphonon;
using nlohmann::json;

namespace {

json minimal() {
  return json{{"trap", {{"nu_z_hz", 2.0e6}, {"nu_y_hz", 1.0e7}}},
              {"atoms", {{"mass_u", 173.0}}},
              {"rotor",
               {{"mass_u", 251.0},
                {"dipole_debye", 3.4},
                {"b_hz", 7.345e9}}}};
}

std::string parse_failure(const json& j) {
  try {
    parse_config(j);
  } catch (const validation_error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal configuration fills the documented defaults") {
  const RunConfig cfg = parse_config(minimal());
  CHECK(cfg.nu_z_hz == 2.0e6);
  CHECK(cfg.nu_y_hz == 1.0e7);
  CHECK(cfg.radial_scaling == RadialScaling::pseudopotential);
  CHECK(cfg.atom_mass_u == 173.0);
  CHECK(cfg.atom_charge_e == 1);
  CHECK(cfg.count_per_side == 1);
  CHECK(cfg.rotor_mass_u == 251.0);
  CHECK(cfg.rotor_charge_e == 1);
  CHECK(cfg.dipole_debye == 3.4);
  REQUIRE(cfg.b_hz.has_value());
  CHECK(*cfg.b_hz == 7.345e9);
  CHECK_FALSE(cfg.sphere_radius_angstrom.has_value());
  CHECK(cfg.n_max == 10);
  CHECK(cfg.l_max == 15);
  CHECK_FALSE(cfg.scan.has_value());
  CHECK(cfg.format == "csv");
  CHECK_FALSE(cfg.out_path.has_value());
}

TEST_CASE("configuration round trip is the identity") {
  json j = minimal();
  j["trap"]["radial_scaling"] = "uniform";
  j["rotor"].erase("b_hz");
  j["rotor"]["sphere"] = {{"radius_angstrom", 10.0}};
  j["basis"] = {{"n_max", 6}, {"l_max", 8}};
  j["scan"] = {{"parameter", "rotor_mass"},
               {"min", 100.0},
               {"max", 1.0e6},
               {"steps", 50},
               {"spacing", "log"},
               {"observables", {"mode_freqs", "coupling"}}};
  j["output"] = {{"format", "json"}, {"path", "out.json"}};

  const RunConfig cfg = parse_config(j);
  const RunConfig again = parse_config(serialize_config(cfg));
  CHECK(cfg == again);

  // The canonical echo itself is a fixed point, byte for byte.
  CHECK(serialize_config(cfg).dump(2) == serialize_config(again).dump(2));
}

TEST_CASE("unknown keys are rejected with their full path") {
  json j = minimal();
  j["trap"]["nu_x_hz"] = 1.0e6;
  const std::string msg = parse_failure(j);
  CHECK(msg.find("trap.nu_x_hz") != std::string::npos);
  CHECK(msg.find("unknown") != std::string::npos);
}

TEST_CASE("an empty configuration reports every missing section") {
  const std::string msg = parse_failure(json::object());
  CHECK(msg.find("trap") != std::string::npos);
  CHECK(msg.find("atoms") != std::string::npos);
  CHECK(msg.find("rotor") != std::string::npos);
}

TEST_CASE("multiple violations come back in one error") {
  json j = minimal();
  j["trap"]["nu_z_hz"] = 0.0;
  j["rotor"]["dipole_debye"] = -1.0;
  j["atoms"]["count_per_side"] = 0;
  const std::string msg = parse_failure(j);
  CHECK(msg.find("nu_z_hz") != std::string::npos);
  CHECK(msg.find("dipole_debye") != std::string::npos);
  CHECK(msg.find("count_per_side") != std::string::npos);
}

TEST_CASE("the rotational constant needs exactly one source") {
  json both = minimal();
  both["rotor"]["sphere"] = {{"radius_angstrom", 10.0}};
  CHECK(parse_failure(both).find("exactly one") != std::string::npos);

  json neither = minimal();
  neither["rotor"].erase("b_hz");
  CHECK(parse_failure(neither).find("exactly one") != std::string::npos);
}

TEST_CASE("basis bounds are enforced") {
  json j = minimal();
  j["basis"] = {{"n_max", 0}, {"l_max", 1}};
  const std::string msg = parse_failure(j);
  CHECK(msg.find("n_max") != std::string::npos);
  CHECK(msg.find("l_max") != std::string::npos);
}

TEST_CASE("scan section needs exactly one grid description") {
  json j = minimal();
  j["scan"] = {{"parameter", "rotor_mass"},
               {"grid", {100.0, 200.0}},
               {"min", 100.0},
               {"max", 200.0},
               {"steps", 5},
               {"observables", {"mode_freqs"}}};
  CHECK_FALSE(parse_failure(j).empty());

  json none = minimal();
  none["scan"] = {{"parameter", "rotor_mass"},
                  {"observables", {"mode_freqs"}}};
  CHECK_FALSE(parse_failure(none).empty());
}

TEST_CASE("scan observables are validated and canonicalized") {
  json j = minimal();
  j["scan"] = {{"parameter", "rotor_mass"},
               {"grid", {100.0, 200.0}},
               {"observables", {"coupling", "mode_freqs", "coupling"}}};
  const RunConfig cfg = parse_config(j);
  REQUIRE(cfg.scan.has_value());
  REQUIRE(cfg.scan->observables.size() == 2);
  CHECK(cfg.scan->observables[0] == Observable::mode_freqs);
  CHECK(cfg.scan->observables[1] == Observable::coupling);

  json bad = j;
  bad["scan"]["observables"] = {"frequencies"};
  CHECK(parse_failure(bad).find("observables") != std::string::npos);
}

TEST_CASE("scenario conversion applies the user units") {
  const RunConfig cfg = parse_config(minimal());
  const Scenario s = cfg.scenario();
  CHECK(s.atom_mass == doctest::Approx(173.0 * constants::amu).epsilon(1e-15));
  CHECK(s.rotor_mass == doctest::Approx(251.0 * constants::amu).epsilon(1e-15));
  CHECK(s.dipole == doctest::Approx(3.4 * constants::debye).epsilon(1e-15));
  CHECK(s.B() == 7.345e9);
  CHECK(s.basis.n_max == 10);
  CHECK(s.basis.l_max == 15);
}

TEST_CASE("branch names resolve to a direction and label") {
  CHECK(parse_branch("axial_com") ==
        std::pair(Direction::axial, ModeLabel::com));
  CHECK(parse_branch("radial_com") ==
        std::pair(Direction::radial, ModeLabel::com));
  CHECK(parse_branch("egyptian") ==
        std::pair(Direction::axial, ModeLabel::egyptian));
  CHECK(parse_branch("breathing") ==
        std::pair(Direction::axial, ModeLabel::breathing));
  CHECK(parse_branch("rocking") ==
        std::pair(Direction::radial, ModeLabel::rocking));
  CHECK(parse_branch("zigzag") ==
        std::pair(Direction::radial, ModeLabel::zigzag));
  CHECK_THROWS_AS(parse_branch("com"), validation_error);
  CHECK_THROWS_AS(parse_branch("axial_zigzag"), validation_error);
  CHECK_THROWS_AS(parse_branch("sideways_com"), validation_error);
}

TEST_CASE("table renders to CSV with full precision") {
  ScanTable t;
  t.param_name = "rotor_mass";
  t.param = {1.0, 2.5};
  t.columns = {"a", "b"};
  t.values = {{2.0, std::numeric_limits<double>::quiet_NaN()}, {3.14, 7.0}};
  t.flags = {"ok", "unstable_radial"};

  const std::string csv = table_to_csv(t);
  CHECK(csv ==
        "param,a,b,flags\n"
        "1,2,nan,ok\n"
        "2.5,3.1400000000000001,7,unstable_radial\n");
}

TEST_CASE("table JSON round trip preserves missing values") {
  ScanTable t;
  t.param_name = "nu_z";
  t.param = {1.0e6, 2.0e6};
  t.columns = {"x"};
  t.values = {{4.25}, {std::numeric_limits<double>::quiet_NaN()}};
  t.flags = {"ok", "resonant_pt"};

  const ScanTable back = table_from_json(table_to_json(t));
  CHECK(back.param_name == t.param_name);
  CHECK(back.param == t.param);
  CHECK(back.columns == t.columns);
  CHECK(back.flags == t.flags);
  CHECK(back.values[0][0] == 4.25);
  CHECK(std::isnan(back.values[1][0]));

  // NaN must serialize as null, not as a bare token json cannot read back.
  CHECK(table_to_json(t)["rows"][1]["values"][0].is_null());
}

TEST_CASE("command envelopes are deterministic and carry no timing") {
  json j = minimal();
  j["rotor"]["mass_u"] = 4116.0;
  j["rotor"].erase("b_hz");
  j["rotor"]["sphere"] = {{"radius_angstrom", 10.0}};
  j["trap"]["radial_scaling"] = "uniform";
  const RunConfig cfg = parse_config(j);

  const ResultEnvelope a = cmd_modes(cfg);
  const ResultEnvelope b = cmd_modes(cfg);
  CHECK(a.to_json().dump(2) == b.to_json().dump(2));

  const nlohmann::ordered_json out = a.to_json();
  CHECK(out.contains("version"));
  CHECK(out.contains("command"));
  CHECK(out.contains("config"));
  CHECK(out.contains("payload"));
  CHECK_FALSE(out.contains("wall_ms"));
  CHECK(out["command"] == "modes");

  // The embedded config echo is the canonical serialization.
  CHECK(out["config"] == serialize_config(cfg));
}

TEST_CASE("file loading distinguishes missing files from bad syntax") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/rotorphonon.json"), io_error);

  const std::string path = "/tmp/rotorphonon_bad_syntax.json";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    fputs("{ not json", f);
    fclose(f);
  }
  CHECK_THROWS_AS(load_config_file(path), validation_error);
  remove(path.c_str());
}
