#pragma once

#include <map>
#include <string>
#include <vector>

#include "zkflat/basis.hpp"
#include "zkflat/freeflow.hpp"
#include "zkflat/synthesis.hpp"

namespace zkflat {

/// Shortest decimal form that round-trips the double exactly.
std::string fmt_double(double v);

/// FNV-1a hex digest used to stamp artifacts with their configuration.
std::string config_hash_hex(const std::string& canonical_config);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Comma-separated, '.' decimal, LF endings; comment lines start with '#'.
void write_csv(const std::string& path, const CsvTable& table,
               const std::string& config_hash = "");
CsvTable read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Key-value config file with [section] headers; keys are returned as
/// "section.key".
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Control signal as (t, y, h) rows.
CsvTable control_to_csv(const ControlSignal& h);
ControlSignal control_from_csv(const CsvTable& table, int j_max);

/// Free-flow snapshots as (j, t, x, value) rows.
CsvTable evolution_to_csv(const std::vector<ModeEvolution>& evs, int t_stride = 1);

/// Terminal state as (x, y, value) rows.
CsvTable field2d_to_csv(const Field& f);

/// Flat output samples as JSON: {config_hash?, entries: [{j, i, samples}]}.
std::string flat_output_to_json(const FlatOutput& z, const std::vector<double>& times,
                                const std::string& config_hash = "");

/// Reach coefficients as JSON: {config_hash?, entries: [{i, j, value}]}.
std::string reach_coefficients_to_json(const ReachCoefficients& b,
                                       const std::string& config_hash = "");

/// Mode view of a control: {config_hash?, t: [...], modes: [{j, values}]}.
std::string control_modes_to_json(const ControlSignal& h,
                                  const std::string& config_hash = "");

} // namespace zkflat
