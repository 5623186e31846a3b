#include "pvfc/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pvfc/error.hpp"

namespace pvfc::csv {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<HourlyPowerSeries> load_series(std::istream& in, const std::string& source) {
  using Key = std::pair<MeasurementLevel, std::string>;
  std::map<Key, std::map<UtcHour, double>> groups;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kSeriesHeader) parse_fail(source, line_no, std::string("expected header '") + kSeriesHeader + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != 4) parse_fail(source, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    UtcHour ts;
    MeasurementLevel level;
    try {
      ts = UtcHour::parse_iso(fields[0]);
      level = parse_level(fields[1]);
    } catch (const Error& e) {
      parse_fail(source, line_no, e.detail());
    }
    if (fields[2].empty()) parse_fail(source, line_no, "empty series_id");
    double value = 0.0;
    const auto* first = fields[3].data();
    const auto* last = first + fields[3].size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      parse_fail(source, line_no, "bad power_kw '" + std::string(fields[3]) + "'");
    }
    auto& group = groups[{level, std::string(fields[2])}];
    if (!group.emplace(ts, value).second) {
      throw Error(ErrorCode::DuplicateRow, source + ":" + std::to_string(line_no) + ": duplicate (" +
                                               ts.iso() + ", " + std::string(fields[1]) + ", " +
                                               std::string(fields[2]) + ")");
    }
  }
  if (!header_seen) parse_fail(source, line_no, "missing header");

  std::vector<HourlyPowerSeries> out;
  for (auto& [key, rows] : groups) {
    const UtcHour start = rows.begin()->first;
    std::vector<double> values;
    values.reserve(rows.size());
    std::vector<std::string> missing;
    UtcHour expected = start;
    for (const auto& [ts, v] : rows) {
      for (; expected < ts; expected = expected + 1) {
        if (missing.size() < 10) missing.push_back(expected.iso());
      }
      values.push_back(v);
      expected = ts + 1;
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw Error(ErrorCode::GapError, std::string(to_string(key.first)) + "/" + key.second + " missing hours: " + list);
    }
    out.emplace_back(key.second, key.first, start, std::move(values));
  }
  return out;
}

std::vector<HourlyPowerSeries> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load_series(in, path.string());
}

void write_series(std::ostream& out, const std::vector<HourlyPowerSeries>& series) {
  out << kSeriesHeader << '\n';
  for (const auto& s : series) {
    const std::string level(to_string(s.level()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << (s.start() + static_cast<std::int64_t>(i)).iso() << ',' << level << ',' << s.site_id() << ','
          << format_double(s[i]) << '\n';
    }
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<HourlyPowerSeries>& series) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_series(out, series);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_profile(std::ostream& out, const clearsky::ClearSkyProfile& profile) {
  out << "timestamp_utc,ghi_wm2,power_kw\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << (profile.start + static_cast<std::int64_t>(i)).iso() << ',' << format_double(profile.ghi_wm2[i]) << ','
        << format_double(profile.power_kw[i]) << '\n';
  }
}

MultiLevelDataset to_dataset(const std::vector<HourlyPowerSeries>& series, const SiteConfig& site,
                             bool trim_to_overlap) {
  std::array<const HourlyPowerSeries*, 3> by_level{nullptr, nullptr, nullptr};
  for (const auto& s : series) {
    auto& slot = by_level[level_index(s.level())];
    if (slot != nullptr) {
      throw Error(ErrorCode::LevelTagMismatch, "more than one series for level " + std::string(to_string(s.level())));
    }
    slot = &s;
  }
  for (auto level : kAllLevels) {
    if (by_level[level_index(level)] == nullptr) {
      throw Error(ErrorCode::LevelTagMismatch, "no series for level " + std::string(to_string(level)));
    }
  }
  if (!trim_to_overlap) {
    return align_levels(*by_level[0], *by_level[1], *by_level[2], site);
  }
  UtcHour lo = by_level[0]->start();
  UtcHour hi = by_level[0]->end();
  for (const auto* s : by_level) {
    lo = std::max(lo, s->start());
    hi = std::min(hi, s->end());
  }
  if (!(lo < hi)) throw Error(ErrorCode::MisalignedRange, "series do not overlap");
  const auto n = static_cast<std::size_t>(hi - lo);
  auto cut = [&](const HourlyPowerSeries* s) { return s->slice(static_cast<std::size_t>(lo - s->start()), n); };
  return align_levels(cut(by_level[0]), cut(by_level[1]), cut(by_level[2]), site);
}

}  // namespace pvfc::csv
