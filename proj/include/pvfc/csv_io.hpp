#pragma once

// Flat CSV schema shared by every level:
//   timestamp_utc,level,series_id,power_kw
// Timestamps are ISO-8601 UTC on the hour; values are written with 17
// significant digits so a write/load cycle is lossless.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvfc/clearsky.hpp"
#include "pvfc/core_model.hpp"

namespace pvfc::csv {

inline constexpr const char* kSeriesHeader = "timestamp_utc,level,series_id,power_kw";

/// Groups rows by (level, series_id) into gap-free series, ordered by level
/// then series_id. Throws ParseError (with line number), GapError (naming the
/// missing hours) or DuplicateRow.
std::vector<HourlyPowerSeries> load_series(std::istream& in, const std::string& source = "<stream>");
std::vector<HourlyPowerSeries> load_csv(const std::filesystem::path& path);

void write_series(std::ostream& out, const std::vector<HourlyPowerSeries>& series);
void write_csv(const std::filesystem::path& path, const std::vector<HourlyPowerSeries>& series);

void write_profile(std::ostream& out, const clearsky::ClearSkyProfile& profile);

/// One series per level; with `trim_to_overlap` the three are cut to their
/// common hour range first.
MultiLevelDataset to_dataset(const std::vector<HourlyPowerSeries>& series, const SiteConfig& site,
                             bool trim_to_overlap);

std::string format_double(double v);  ///< %.17g
std::string format_fixed2(double v);  ///< %.2f

}  // namespace pvfc::csv
