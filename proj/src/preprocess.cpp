#include "pvfc/preprocess.hpp"

#include <algorithm>

#include "pvfc/error.hpp"

namespace pvfc::preprocess {

namespace {

void require_aligned(const HourlyPowerSeries& series, const clearsky::ClearSkyProfile& profile) {
  if (series.start() != profile.start) {
    throw Error(ErrorCode::MisalignedRange, "series and clear-sky profile start at different hours");
  }
  if (series.size() != profile.size()) {
    throw Error(ErrorCode::LengthMismatch, "series and clear-sky profile differ in length");
  }
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

OffsetResult remove_offset(const HourlyPowerSeries& series, const clearsky::ClearSkyProfile& profile) {
  require_aligned(series, profile);
  std::vector<double> night;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (profile.power_kw[i] == 0.0) night.push_back(series[i]);
  }
  if (night.empty()) throw Error(ErrorCode::NoNightHours, "clear-sky profile never reaches zero");
  // A negative median means the sensor reads low at night; raising the series
  // would invent generation, so only a positive bias is subtracted.
  const double offset = std::max(0.0, median(std::move(night)));
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = std::max(0.0, series[i] - offset);
  return {series.with_values(std::move(out)), offset};
}

std::vector<bool> day_mask(const clearsky::ClearSkyProfile& profile, const SiteConfig& site,
                           const Options& opt) {
  const double threshold = opt.day_threshold_fraction * site.ac_rating();
  std::vector<bool> mask(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    mask[i] = profile.power_kw[i] > 0.0 && profile.power_kw[i] >= threshold;
  }
  return mask;
}

PreprocessedSeries normalize_and_mask(const HourlyPowerSeries& series,
                                      const clearsky::ClearSkyProfile& profile, const SiteConfig& site,
                                      const Options& opt) {
  require_aligned(series, profile);
  PreprocessedSeries out;
  out.day_mask = day_mask(profile, site, opt);
  out.source_start = series.start();
  out.source_n = series.size();
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!out.day_mask[i]) continue;
    const double ratio = std::max(0.0, series[i]) / profile.power_kw[i];
    if (ratio >= opt.kappa_max) {
      ++out.clip_count;
      out.index_values.push_back(opt.kappa_max);
    } else {
      out.index_values.push_back(ratio);
    }
  }
  if (out.index_values.empty()) throw Error(ErrorCode::AllNight, "no hour exceeds the day threshold");
  return out;
}

PreprocessedSeries preprocess(const HourlyPowerSeries& series, const clearsky::ClearSkyProfile& profile,
                              const SiteConfig& site, const Options& opt) {
  auto [clean, offset] = remove_offset(series, profile);
  auto out = normalize_and_mask(clean, profile, site, opt);
  out.offset_kw = offset;
  return out;
}

HourlyPowerSeries postprocess(std::span<const double> index_values, const std::vector<bool>& day_mask,
                              const clearsky::ClearSkyProfile& profile, MeasurementLevel level,
                              std::string site_id) {
  const auto n_day = static_cast<std::size_t>(std::count(day_mask.begin(), day_mask.end(), true));
  if (n_day != index_values.size()) {
    throw Error(ErrorCode::LengthMismatch, "index count " + std::to_string(index_values.size()) +
                                               " != day hours " + std::to_string(n_day));
  }
  if (profile.size() != day_mask.size()) {
    throw Error(ErrorCode::LengthMismatch, "profile length differs from day mask");
  }
  std::vector<double> kw(day_mask.size(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < day_mask.size(); ++i) {
    if (day_mask[i]) kw[i] = index_values[k++] * profile.power_kw[i];
  }
  return HourlyPowerSeries(std::move(site_id), level, profile.start, std::move(kw));
}

}  // namespace pvfc::preprocess
