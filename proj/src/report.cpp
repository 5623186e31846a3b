#include "pvfc/report.hpp"

#include <fstream>
#include <sstream>

#include "pvfc/csv_io.hpp"
#include "pvfc/error.hpp"

namespace pvfc::report {

namespace fs = std::filesystem;
using csv::format_double;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string case_stem(const pipeline::CaseResult& r) {
  return std::string(pipeline::to_string(r.case_id)) + "_" + std::string(to_string(r.weather));
}

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string levels_text(const pipeline::LevelSet& levels) {
  std::string out;
  for (auto l : levels) out += (out.empty() ? "" : "+") + std::string(to_string(l));
  return out;
}

}  // namespace

std::string percent2(double fraction) { return csv::format_fixed2(100.0 * fraction); }

fs::path write_case(const pipeline::CaseResult& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto stem = case_stem(r);

  std::vector<MeasurementLevel> rows;
  if (r.case_id == pipeline::CaseId::Case1) {
    rows.assign(kAllLevels.begin(), kAllLevels.end());
  } else {
    rows.push_back(r.forecast.level());
  }

  std::ostringstream human;
  std::ostringstream full;
  human << "level,rmse_kw,mape_pct\n";
  full << "level,rmse_kw,mape,r_squared,n_used,n_excluded,mean_actual_kw,levels_used,selected_level,"
          "seed,attempts,target_met\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& rep = r.per_level_reports.at(i);
    const std::string level(to_string(rows[i]));
    human << level << ',' << csv::format_fixed2(rep.rmse) << ',' << percent2(rep.mape) << '\n';
    full << level << ',' << format_double(rep.rmse) << ',' << format_double(rep.mape) << ','
         << optional_text(rep.r_squared) << ',' << rep.n_used << ',' << rep.n_excluded << ','
         << format_double(rep.mean_actual) << ',' << levels_text(r.levels_used) << ','
         << (r.selected_level ? std::string(to_string(*r.selected_level)) : std::string()) << ',' << r.seed << ','
         << r.attempts << ',' << (r.errors ? (r.errors->target_met ? "1" : "0") : "") << '\n';
  }
  const auto human_path = out_dir / (stem + ".csv");
  write_file(human_path, human.str());
  write_file(out_dir / (stem + ".full.csv"), full.str());

  std::ostringstream fc;
  csv::write_series(fc, r.level_forecasts.empty() ? std::vector<HourlyPowerSeries>{r.forecast} : r.level_forecasts);
  write_file(out_dir / (stem + "_forecast.csv"), fc.str());
  return human_path;
}

bool write_comparison(const pipeline::ComparisonTable& table, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ostringstream human;
  std::ostringstream full;
  human << kCasesHeader << '\n';
  full << "weather,day,mean_index,case1_min_mape,case2_mape,case3_mape,case4_mape,reduction_vs_case1_pct,"
          "reduction_vs_case3_pct,reduction_vs_case4_pct,target_met\n";
  for (const auto& row : table.rows) {
    const std::string w(to_string(row.weather));
    human << w << ',' << percent2(row.case1_min_mape) << ',' << percent2(row.case2_mape) << ','
          << percent2(row.case3_mape) << ',' << percent2(row.case4_mape) << ','
          << csv::format_fixed2(row.reduction_vs_case1_pct()) << '\n';
    full << w << ',' << row.day << ',' << format_double(row.mean_index) << ',' << format_double(row.case1_min_mape)
         << ',' << format_double(row.case2_mape) << ',' << format_double(row.case3_mape) << ','
         << format_double(row.case4_mape) << ',' << format_double(row.reduction_vs_case1_pct()) << ','
         << format_double(row.reduction_vs_case3_pct()) << ',' << format_double(row.reduction_vs_case4_pct())
         << ',' << (row.target_met ? 1 : 0) << '\n';
    for (const auto& c : row.cases) write_case(c, out_dir);
  }
  write_file(out_dir / "cases.csv", human.str());
  write_file(out_dir / "cases.full.csv", full.str());
  return !table.rows.empty();
}

void write_fit(const std::vector<narnet::FittingModel>& models, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ostringstream human;
  std::ostringstream full;
  human << "level,mape_pct,r_squared\n";
  full << "level,mape,r_squared,seed,epochs\n";
  for (const auto& m : models) {
    const std::string level(to_string(m.level));
    char r2[32];
    std::snprintf(r2, sizeof r2, "%.4f", m.fit_r2);
    human << level << ',' << percent2(m.fit_mape) << ',' << r2 << '\n';
    full << level << ',' << format_double(m.fit_mape) << ',' << format_double(m.fit_r2) << ','
         << m.net.config().seed << ',' << m.net.training_history.size() << '\n';
  }
  write_file(out_dir / "fit.csv", human.str());
  write_file(out_dir / "fit.full.csv", full.str());
}

void write_plotdata(const HourlyPowerSeries& actual, const HourlyPowerSeries& forecast, const fs::path& path) {
  if (actual.size() != forecast.size() || actual.start() != forecast.start()) {
    throw Error(ErrorCode::LengthMismatch, "actual and forecast cover different hours");
  }
  std::ostringstream out;
  out << "timestamp_utc,actual_kw,forecast_kw\n";
  for (std::size_t i = 0; i < actual.size(); ++i) {
    out << (actual.start() + static_cast<std::int64_t>(i)).iso() << ',' << format_double(actual[i]) << ','
        << format_double(forecast[i]) << '\n';
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path, out.str());
}

}  // namespace pvfc::report
