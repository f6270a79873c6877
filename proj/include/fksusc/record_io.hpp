#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fksusc/run.hpp"

namespace fksusc {

/// Structured record: numeric sections only, deterministic for a given config.
nlohmann::json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);

/// Wall-clock timings, kept apart from the record so the record stays reproducible.
nlohmann::json record_metadata(const RunRecord& record);

/// Comma-separated rows, one per (point, ell, route), after one `#` header line
/// carrying the version tag and the column names.
void write_tabular(std::ostream& out, const RunRecord& record);

/// Writes <stem>.csv and/or <stem>.json plus <stem>.meta.json into `dir`.
/// Throws Error if any file cannot be written; the record is left untouched.
std::vector<std::filesystem::path> emit(const RunRecord& record, OutputFormat format,
                                        const std::filesystem::path& dir,
                                        const std::string& stem);

}  // namespace fksusc
