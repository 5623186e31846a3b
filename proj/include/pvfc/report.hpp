#pragma once

// Report files. Human tables show MAPE as percent with two decimals; every
// human table has a `.full.csv` mirror carrying full-precision values.

#include <filesystem>
#include <string>
#include <vector>

#include "pvfc/narnet.hpp"
#include "pvfc/pipeline.hpp"

namespace pvfc::report {

inline constexpr const char* kCasesHeader =
    "weather,case1_min_mape,case2_mape,case3_mape,case4_mape,reduction_vs_case1_pct";

/// `0.0167` -> `"1.67"`.
std::string percent2(double fraction);

/// caseN_<weather>.csv, its mirror, and caseN_<weather>_forecast.csv.
/// Returns the human table's path.
std::filesystem::path write_case(const pipeline::CaseResult& result, const std::filesystem::path& out_dir);

/// cases.csv and cases.full.csv, plus every case file of every row. Returns
/// false if the table has no rows (the files then hold only headers).
bool write_comparison(const pipeline::ComparisonTable& table, const std::filesystem::path& out_dir);

/// fit.csv (level,mape_pct,r_squared) and fit.full.csv.
void write_fit(const std::vector<narnet::FittingModel>& models, const std::filesystem::path& out_dir);

/// timestamp_utc,actual_kw,forecast_kw for one day.
void write_plotdata(const HourlyPowerSeries& actual, const HourlyPowerSeries& forecast,
                    const std::filesystem::path& path);

}  // namespace pvfc::report
