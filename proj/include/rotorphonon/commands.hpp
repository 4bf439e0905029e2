#pragma once
#include <optional>
#include <string>

#include "rotorphonon/config.hpp"

namespace rotorphonon {

// Common wrapper around every command's result. Wall time is kept for
// diagnostics but never serialized: identical configs must produce
// byte-identical output files.
struct ResultEnvelope {
  std::string version;
  std::string command;
  nlohmann::ordered_json config;   // normalized echo of the input
  nlohmann::ordered_json payload;
  double wall_ms = 0.0;

  nlohmann::ordered_json to_json() const;
};

ResultEnvelope cmd_modes(const RunConfig& cfg);
ResultEnvelope cmd_spectrum(const RunConfig& cfg, const std::string& branch);
ResultEnvelope cmd_shift(const RunConfig& cfg, ShiftMethod method);
ResultEnvelope cmd_scan(const RunConfig& cfg, int threads,
                        ScanTable* out = nullptr);
ResultEnvelope cmd_resonance(const RunConfig& cfg, const std::string& branch,
                             int l, double lo, double hi,
                             ScanParameter param = ScanParameter::nu_z);

// "axial_com", "radial_zigzag", or a bare label whose direction is implied
// (breathing/egyptian axial, rocking/zigzag radial). Bare "com" is rejected
// as ambiguous.
std::pair<Direction, ModeLabel> parse_branch(const std::string& name);

// Tables render to CSV with 17 significant digits; missing values are "nan".
std::string table_to_csv(const ScanTable& table);
nlohmann::ordered_json table_to_json(const ScanTable& table);
ScanTable table_from_json(const nlohmann::json& j);

// Scan results honor `format` ("csv" writes the bare table, "json" the full
// envelope); every other command is always a JSON envelope. Empty path means
// stdout. Throws io_error when the destination cannot be written.
void write_result(const ResultEnvelope& env, const ScanTable* table,
                  const std::string& format,
                  const std::optional<std::string>& path);

}  // namespace rotorphonon
