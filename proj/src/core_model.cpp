#include "pvfc/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "pvfc/error.hpp"

namespace pvfc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MisalignedRange: return "MisalignedRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::LevelTagMismatch: return "LevelTagMismatch";
    case ErrorCode::OutOfRangeDay: return "OutOfRangeDay";
    case ErrorCode::NoNightHours: return "NoNightHours";
    case ErrorCode::AllNight: return "AllNight";
    case ErrorCode::AllExcluded: return "AllExcluded";
    case ErrorCode::ConstantActual: return "ConstantActual";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::SeedLengthMismatch: return "SeedLengthMismatch";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyDay: return "EmptyDay";
    case ErrorCode::MissingWeatherClass: return "MissingWeatherClass";
    case ErrorCode::UnmappedCustomer: return "UnmappedCustomer";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GapError: return "GapError";
    case ErrorCode::DuplicateRow: return "DuplicateRow";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(MeasurementLevel level) {
  switch (level) {
    case MeasurementLevel::Customer: return "customer";
    case MeasurementLevel::Feeder: return "feeder";
    case MeasurementLevel::Substation: return "substation";
  }
  return "unknown";
}

MeasurementLevel parse_level(std::string_view text) {
  for (auto level : kAllLevels) {
    if (text == to_string(level)) return level;
  }
  throw Error(ErrorCode::ParseError, "unknown level '" + std::string(text) + "'");
}

std::string_view to_string(Weather w) {
  switch (w) {
    case Weather::Sunny: return "sunny";
    case Weather::Cloudy: return "cloudy";
    case Weather::PartlyCloudy: return "partly_cloudy";
  }
  return "unknown";
}

Weather parse_weather(std::string_view text) {
  for (auto w : kAllWeather) {
    if (text == to_string(w)) return w;
  }
  throw Error(ErrorCode::ParseError, "unknown weather '" + std::string(text) + "'");
}

HourlyPowerSeries::HourlyPowerSeries(std::string site_id, MeasurementLevel level, UtcHour start,
                                     std::vector<double> values_kw)
    : site_id_(std::move(site_id)), level_(level), start_(start), values_(std::move(values_kw)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "series must have N >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite reading at hour " + (start_ + static_cast<std::int64_t>(i)).iso());
    }
  }
}

HourlyPowerSeries HourlyPowerSeries::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > values_.size()) throw Error(ErrorCode::InvalidArgument, "slice out of range");
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                        values_.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return HourlyPowerSeries(site_id_, level_, start_ + static_cast<std::int64_t>(offset), std::move(v));
}

HourlyPowerSeries HourlyPowerSeries::with_values(std::vector<double> values_kw) const {
  return HourlyPowerSeries(site_id_, level_, start_, std::move(values_kw));
}

SiteConfig::SiteConfig(const Params& p) : p_(p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  require(std::isfinite(p.latitude) && p.latitude >= -90.0 && p.latitude <= 90.0,
          "latitude must be in [-90, 90]");
  require(std::isfinite(p.longitude) && p.longitude >= -180.0 && p.longitude <= 180.0,
          "longitude must be in [-180, 180]");
  require(std::isfinite(p.tz_offset) && p.tz_offset >= -12.0 && p.tz_offset <= 14.0,
          "tz_offset must be in [-12, 14]");
  require(std::isfinite(p.dc_rating) && p.dc_rating > 0.0, "dc_rating must be > 0");
  require(std::isfinite(p.ac_rating) && p.ac_rating > 0.0, "ac_rating must be > 0");
  require(std::isfinite(p.system_efficiency) && p.system_efficiency > 0.0 && p.system_efficiency <= 1.0,
          "system_efficiency must be in (0, 1]");
}

SiteConfig SiteConfig::scaled(double factor) const {
  Params p = p_;
  p.dc_rating *= factor;
  p.ac_rating *= factor;
  return SiteConfig(p);
}

MultiLevelDataset MultiLevelDataset::slice(std::size_t offset, std::size_t count) const {
  return MultiLevelDataset({series_[0].slice(offset, count), series_[1].slice(offset, count),
                            series_[2].slice(offset, count)},
                           site_);
}

MultiLevelDataset align_levels(HourlyPowerSeries c, HourlyPowerSeries f, HourlyPowerSeries s,
                               SiteConfig site) {
  std::array<HourlyPowerSeries*, 3> slots{nullptr, nullptr, nullptr};
  for (HourlyPowerSeries* p : {&c, &f, &s}) {
    auto& slot = slots[level_index(p->level())];
    if (slot != nullptr) {
      throw Error(ErrorCode::LevelTagMismatch,
                  "two series tagged '" + std::string(to_string(p->level())) + "'");
    }
    slot = p;
  }
  const auto& ref = *slots[0];
  for (const auto* p : slots) {
    if (p->start() != ref.start()) {
      throw Error(ErrorCode::MisalignedRange, std::string(to_string(p->level())) + " starts at " +
                                                  p->start().iso() + ", customer at " + ref.start().iso());
    }
  }
  for (const auto* p : slots) {
    if (p->size() != ref.size()) {
      throw Error(ErrorCode::LengthMismatch, std::string(to_string(p->level())) + " has N=" +
                                                 std::to_string(p->size()) + ", customer N=" +
                                                 std::to_string(ref.size()));
    }
  }
  return MultiLevelDataset({std::move(*slots[0]), std::move(*slots[1]), std::move(*slots[2])},
                           std::move(site));
}

ValidationReport validate_series(const HourlyPowerSeries& s, const SiteConfig& site) {
  ValidationReport r;
  r.n = s.size();
  const double limit = 1.1 * site.ac_rating();
  for (double v : s.values()) {
    if (std::isnan(v)) {
      ++r.nan_count;
      continue;
    }
    if (v < 0.0) ++r.negative_count;
    if (v > limit) ++r.over_rating_count;
  }
  r.usable = r.nan_count == 0 && r.n >= kMinUsableHours;
  return r;
}

}  // namespace pvfc
