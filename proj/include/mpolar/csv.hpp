#pragma once

#include <string>
#include <vector>

#include "mpolar/analysis.hpp"

namespace mpolar {

/// Pinned diagnostics CSV schema, one row per record, values printed with 17
/// significant digits so identical runs produce byte-identical files.
std::string csv_header();
std::string csv_to_string(const std::vector<DiagnosticsRecord<double>>& records);
void write_csv(const std::string& path, const std::vector<DiagnosticsRecord<double>>& records);

/// Strict reader for the same schema (used by the decay-fitting subcommand).
std::vector<DiagnosticsRecord<double>> read_csv(const std::string& path);

}  // namespace mpolar
