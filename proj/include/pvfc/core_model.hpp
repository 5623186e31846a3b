#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvfc/time.hpp"

namespace pvfc {

/// Measurement hierarchy. The enumerator order is the tie-break order.
enum class MeasurementLevel { Customer = 0, Feeder = 1, Substation = 2 };

inline constexpr std::array<MeasurementLevel, 3> kAllLevels = {
    MeasurementLevel::Customer, MeasurementLevel::Feeder, MeasurementLevel::Substation};

std::string_view to_string(MeasurementLevel level);
MeasurementLevel parse_level(std::string_view text);

enum class Weather { Sunny = 0, Cloudy = 1, PartlyCloudy = 2 };

inline constexpr std::array<Weather, 3> kAllWeather = {Weather::Sunny, Weather::Cloudy,
                                                       Weather::PartlyCloudy};

std::string_view to_string(Weather w);
Weather parse_weather(std::string_view text);

inline constexpr std::size_t level_index(MeasurementLevel level) {
  return static_cast<std::size_t>(level);
}

/// One level's gap-free hourly PV trace in kW. Immutable; construction rejects
/// empty or non-finite data.
class HourlyPowerSeries {
 public:
  HourlyPowerSeries(std::string site_id, MeasurementLevel level, UtcHour start,
                    std::vector<double> values_kw);

  const std::string& site_id() const { return site_id_; }
  MeasurementLevel level() const { return level_; }
  UtcHour start() const { return start_; }
  UtcHour end() const { return start_ + static_cast<std::int64_t>(values_.size()); }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Hours [offset, offset + count) as a new series.
  HourlyPowerSeries slice(std::size_t offset, std::size_t count) const;
  HourlyPowerSeries with_values(std::vector<double> values_kw) const;

  friend bool operator==(const HourlyPowerSeries&, const HourlyPowerSeries&) = default;

 private:
  std::string site_id_;
  MeasurementLevel level_;
  UtcHour start_;
  std::vector<double> values_;
};

class SiteConfig {
 public:
  struct Params {
    double latitude = 39.74;
    double longitude = -104.99;
    double tz_offset = -7.0;
    double dc_rating = 100.0;
    double ac_rating = 100.0;
    double system_efficiency = 0.96;
  };

  SiteConfig() : SiteConfig(Params{}) {}
  explicit SiteConfig(const Params& p);

  double latitude() const { return p_.latitude; }
  double longitude() const { return p_.longitude; }
  double tz_offset() const { return p_.tz_offset; }
  double dc_rating() const { return p_.dc_rating; }
  double ac_rating() const { return p_.ac_rating; }
  double system_efficiency() const { return p_.system_efficiency; }
  const Params& params() const { return p_; }

  /// Same site, nameplate scaled by `factor` (used for per-level capacities).
  SiteConfig scaled(double factor) const;

  friend bool operator==(const SiteConfig& a, const SiteConfig& b) {
    return a.p_.latitude == b.p_.latitude && a.p_.longitude == b.p_.longitude &&
           a.p_.tz_offset == b.p_.tz_offset && a.p_.dc_rating == b.p_.dc_rating &&
           a.p_.ac_rating == b.p_.ac_rating && a.p_.system_efficiency == b.p_.system_efficiency;
  }

 private:
  Params p_;
};

/// Customer, feeder and substation traces on an identical hourly grid.
class MultiLevelDataset {
 public:
  const HourlyPowerSeries& customer() const { return series_[0]; }
  const HourlyPowerSeries& feeder() const { return series_[1]; }
  const HourlyPowerSeries& substation() const { return series_[2]; }
  const HourlyPowerSeries& level(MeasurementLevel l) const { return series_[level_index(l)]; }
  const SiteConfig& site() const { return site_; }
  UtcHour start() const { return series_[0].start(); }
  std::size_t size() const { return series_[0].size(); }

  MultiLevelDataset slice(std::size_t offset, std::size_t count) const;

  friend bool operator==(const MultiLevelDataset&, const MultiLevelDataset&) = default;

 private:
  friend MultiLevelDataset align_levels(HourlyPowerSeries, HourlyPowerSeries, HourlyPowerSeries,
                                        SiteConfig);
  MultiLevelDataset(std::array<HourlyPowerSeries, 3> series, SiteConfig site)
      : series_(std::move(series)), site_(std::move(site)) {}

  std::array<HourlyPowerSeries, 3> series_;
  SiteConfig site_;
};

/// Builds a dataset from one series per level. Arguments may come in any order;
/// they are placed by their level tag. Throws LevelTagMismatch unless the tags
/// are exactly {Customer, Feeder, Substation}, MisalignedRange if starts
/// differ, LengthMismatch if lengths differ.
MultiLevelDataset align_levels(HourlyPowerSeries c, HourlyPowerSeries f, HourlyPowerSeries s,
                               SiteConfig site);

struct ValidationReport {
  std::size_t negative_count = 0;
  std::size_t over_rating_count = 0;
  std::size_t nan_count = 0;
  std::size_t n = 0;
  bool usable = false;
};

inline constexpr std::size_t kMinUsableHours = 30 * 24;

ValidationReport validate_series(const HourlyPowerSeries& s, const SiteConfig& site);

}  // namespace pvfc
