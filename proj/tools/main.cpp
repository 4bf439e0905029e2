#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotorphonon/commands.hpp"

using namespace rotorphonon;

namespace {

ScanParameter parse_parameter(const std::string& s) {
  if (s == "rotor_mass") return ScanParameter::rotor_mass;
  if (s == "nu_z") return ScanParameter::nu_z;
  if (s == "nu_y") return ScanParameter::nu_y;
  if (s == "dipole") return ScanParameter::dipole;
  if (s == "rot_const") return ScanParameter::rot_const;
  throw validation_error("unknown parameter '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Vibrational modes and rotor-dressed spectra of mixed-species ion "
      "chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string cli_out;
  std::string cli_format;
  int threads = 0;
  unsigned long seed = 0;
  app.add_option("-c,--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("-o,--out", cli_out,
                 "output path (default: output.path from the config, else "
                 "stdout)");
  app.add_option("-f,--format", cli_format,
                 "scan table format; non-scan commands always emit JSON")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-t,--threads", threads,
                 "worker threads for scans (0 = auto / ROTORPHONON_THREADS)");
  app.add_option("--seed", seed,
                 "accepted for pipeline compatibility; nothing draws random "
                 "numbers yet");

  auto* c_modes = app.add_subcommand(
      "modes", "equilibrium positions, normal modes, labels, couplings");

  auto* c_spectrum =
      app.add_subcommand("spectrum", "dressed spectrum of one labeled mode");
  std::string sp_branch;
  c_spectrum
      ->add_option("--mode", sp_branch,
                   "branch name, e.g. egyptian or radial_zigzag")
      ->required();

  auto* c_shift = app.add_subcommand(
      "shift", "sideband shifts and second-order level shifts per mode");
  std::string method = "pt";
  c_shift->add_option("--method", method, "pt or exact")
      ->check(CLI::IsMember({"pt", "exact"}));

  auto* c_scan = app.add_subcommand("scan", "run the scan section of the config");

  auto* c_res = app.add_subcommand(
      "resonance",
      "locate the parameter value where a branch meets the rotor transition");
  std::string rs_branch;
  c_res->add_option("--branch", rs_branch, "branch to follow")->required();
  int rs_l = 0;
  c_res->add_option("--l", rs_l, "rotor quantum number of the lower level");
  std::vector<double> bracket;
  c_res->add_option("--bracket", bracket, "search bracket lo,hi (user units)")
      ->required()
      ->expected(2)
      ->delimiter(',');
  std::string rs_param = "nu_z";
  c_res->add_option("--param", rs_param, "which parameter to vary")
      ->check(CLI::IsMember(
          {"rotor_mass", "nu_z", "nu_y", "dipole", "rot_const"}));

  for (CLI::App* sub : {c_modes, c_spectrum, c_shift, c_scan, c_res})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config_file(config_path);
    if (app.count("--format") > 0) cfg.format = cli_format;
    if (app.count("--out") > 0) cfg.out_path = cli_out;

    ResultEnvelope env;
    ScanTable table;
    const ScanTable* table_ptr = nullptr;
    if (app.got_subcommand("modes")) {
      env = cmd_modes(cfg);
    } else if (app.got_subcommand("spectrum")) {
      env = cmd_spectrum(cfg, sp_branch);
    } else if (app.got_subcommand("shift")) {
      env = cmd_shift(cfg, method == "pt" ? ShiftMethod::perturbative
                                          : ShiftMethod::exact);
    } else if (app.got_subcommand("scan")) {
      env = cmd_scan(cfg, threads, &table);
      table_ptr = &table;
    } else {
      env = cmd_resonance(cfg, rs_branch, rs_l, bracket[0], bracket[1],
                          parse_parameter(rs_param));
    }
    write_result(env, table_ptr, cfg.format, cfg.out_path);
    std::cerr << env.command << " finished in " << env.wall_ms << " ms\n";
    return 0;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
