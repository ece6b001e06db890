#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfc/simulation.hpp"

namespace mfc {

/// Column names: t, then per loop y_ref, y_true, y_meas, u, e, f_est,
/// ref_moving (suffixed _1, _2, ... when there is more than one loop), then
/// the plant's extra columns.
std::vector<std::string> csv_columns(const TimeSeries& ts);

/// Header plus one row per sample, "%.17g", comma separated, LF endings.
void write_csv(const TimeSeries& ts, std::ostream& out);
std::string csv_string(const TimeSeries& ts);

/// Writes to `path`; throws IoError naming the path on failure.
void emit_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Reads a file produced by emit_csv. The divergence flag is not stored in
/// the file and reads back false.
TimeSeries read_csv(const std::filesystem::path& path);
TimeSeries parse_csv(const std::string& text);

}  // namespace mfc
