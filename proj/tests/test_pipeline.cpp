#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pvfc/error.hpp"
#include "pvfc/pipeline.hpp"
#include "pvfc/synth.hpp"

using namespace pvfc;
using namespace pvfc::pipeline;
using L = MeasurementLevel;

namespace {

narnet::FittingModel fm(L level, double r2, double mape) {
  return {level, narnet::init_network(narnet::NetworkConfig{}), r2, mape};
}

struct Fixture {
  synth::SynthOutput data;
  PipelineConfig config;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    synth::SynthConfig sc;
    sc.days = 34;
    sc.n_customers = 16;
    sc.seed = 5;
    Fixture out{synth::gen_dataset(sc, SiteConfig{}), {}};
    out.config.level_scale = out.data.level_scale;
    out.config.network.max_epochs = 40;
    out.config.max_retries = 1;
    return out;
  }();
  return f;
}

}  // namespace

TEST_CASE("case level sets") {
  CHECK(case_levels(CaseId::Case1).empty());
  CHECK(case_levels(CaseId::Case2) == LevelSet{L::Customer, L::Feeder, L::Substation});
  CHECK(case_levels(CaseId::Case3) == LevelSet{L::Customer, L::Feeder});
  CHECK(case_levels(CaseId::Case4) == LevelSet{L::Customer});
}

TEST_CASE("best fitting model selection") {
  CHECK(select_best_fitting({fm(L::Customer, 0.9987, 0.0239), fm(L::Feeder, 0.996, 0.0378),
                             fm(L::Substation, 0.9873, 0.0595)})
            .level == L::Customer);
  CHECK(select_best_fitting({fm(L::Customer, 0.99, 0.03), fm(L::Feeder, 0.99, 0.02), fm(L::Substation, 0.99, 0.04)})
            .level == L::Feeder);
  CHECK(select_best_fitting({fm(L::Substation, 0.5, 0.1)}).level == L::Substation);
  CHECK(select_best_fitting({fm(L::Feeder, 0.9, 0.1), fm(L::Customer, 0.9, 0.1)}).level == L::Customer);
  CHECK_THROWS_AS(select_best_fitting({}), Error);
}

TEST_CASE("selection is invariant to rank-preserving rescaling") {
  const std::vector<narnet::FittingModel> base{fm(L::Customer, 0.91, 0.05), fm(L::Feeder, 0.97, 0.04),
                                               fm(L::Substation, 0.95, 0.03)};
  for (double k : {0.5, 0.9, 1.0}) {
    auto scaled = base;
    for (auto& m : scaled) m.fit_r2 = k * m.fit_r2 - 0.1;
    CHECK(select_best_fitting(scaled).level == select_best_fitting(base).level);
  }
}

TEST_CASE("weather classification thresholds") {
  CHECK(classify_weather_day(std::vector<double>{0.95}) == Weather::Sunny);
  CHECK(classify_weather_day(std::vector<double>{0.30}) == Weather::Cloudy);
  CHECK(classify_weather_day(std::vector<double>{0.60}) == Weather::PartlyCloudy);
  CHECK(classify_weather_day(std::vector<double>{0.8}) == Weather::Sunny);
  CHECK(classify_weather_day(std::vector<double>{0.4}) == Weather::Cloudy);
  CHECK_THROWS_AS(classify_weather_day(std::vector<double>{}), Error);
}

TEST_CASE("target condition and reductions") {
  LevelErrors e{.e_c = 0.2, .e_f = 0.1, .e_s = 0.3, .e_n = std::nullopt, .target_met = false};
  CHECK_FALSE(target_condition(e));
  e.e_n = 0.1;
  CHECK_FALSE(target_condition(e));
  e.e_n = 0.0999;
  CHECK(target_condition(e));
  CHECK(e.baseline_min() == 0.1);
  CHECK(reduction_pct(0.0447, 0.0447) == 0.0);
  CHECK(reduction_pct(4.47, 1.67) == doctest::Approx(62.64).epsilon(1e-3));
}

TEST_CASE("day context guards its inputs") {
  const auto& f = fixture();
  CHECK_THROWS_AS(DayContext(f.data.dataset, f.data.profile, 29, f.config), Error);  // 29 days of history
  CHECK_THROWS_AS(DayContext(f.data.dataset, f.data.profile, 34, f.config), Error);  // past the end
  auto short_profile = f.data.profile.slice(0, 24);
  CHECK_THROWS_AS(DayContext(f.data.dataset, short_profile, 30, f.config), Error);
  try {
    DayContext(f.data.dataset, f.data.profile, 20, f.config);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientHistory);
  }
}

TEST_CASE("fitting models, one per level in fixed order") {
  const auto& f = fixture();
  const auto a = build_fitting_models(f.data.dataset, f.data.profile, 32, f.config);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].level == kAllLevels[i]);
    CHECK(a[i].fit_r2 <= 1.0);
  }
  const auto b = build_fitting_models(f.data.dataset, f.data.profile, 32, f.config);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i].fit_r2 == b[i].fit_r2);
}

TEST_CASE("cases on one day") {
  const auto& f = fixture();
  DayContext ctx(f.data.dataset, f.data.profile, 32, f.config);
  const auto c1 = run_case(CaseId::Case1, ctx);
  CHECK(c1.per_level_reports.size() == 3);
  CHECK(c1.level_forecasts.size() == 3);

  std::array<std::size_t, 3> widths{};
  for (auto id : {CaseId::Case2, CaseId::Case3, CaseId::Case4}) {
    const auto r = run_case(id, ctx);
    CHECK(r.levels_used == case_levels(id));
    CHECK(r.per_level_reports.size() == 1);
    REQUIRE(r.errors.has_value());
    CHECK(r.errors->target_met == (*r.errors->e_n < std::min({r.errors->e_c, r.errors->e_f, r.errors->e_s})));
    CHECK(r.errors->e_c == c1.per_level_reports[0].mape);
    CHECK(r.attempts >= 1);
    CHECK(r.attempts <= 1 + f.config.max_retries);
    CHECK(r.forecast.size() == 24);
    const double ac = f.config.level_site(f.data.dataset.site(), L::Customer).ac_rating();
    for (std::size_t i = 0; i < 24; ++i) {
      if (!ctx.day_mask()[i]) CHECK(r.forecast[i] == 0.0);
      CHECK(r.forecast[i] <= f.config.prep.kappa_max * ac);
    }
    widths[static_cast<std::size_t>(id) - 2] = r.narx_input_width;
  }
  CHECK(widths[0] > widths[1]);
  CHECK(widths[1] > widths[2]);
  const std::size_t d = f.config.network.delay_d;
  CHECK(widths[2] == d * 3);  // customer channel, fitting channel, y lags
}

TEST_CASE("pipeline runs are deterministic") {
  const auto& f = fixture();
  const auto a = run_case(CaseId::Case2, f.data.dataset, f.data.profile, 33, f.config);
  const auto b = run_case(CaseId::Case2, f.data.dataset, f.data.profile, 33, f.config);
  CHECK(a.forecast == b.forecast);
  CHECK(a.seed == b.seed);
  CHECK(a.per_level_reports[0].mape == b.per_level_reports[0].mape);

  const auto direct = forecast_day_ahead(f.data.dataset, f.data.profile, case_levels(CaseId::Case2), 33, f.config);
  CHECK(direct.forecast == a.forecast);
  CHECK(direct.errors.target_met == a.errors->target_met);
}

TEST_CASE("comparison table") {
  const auto& f = fixture();
  const auto t = compare_cases(f.data.dataset, f.data.profile, {31, 32, 33}, f.config);
  CHECK(t.rows.size() + t.missing.size() == 3);
  for (const auto& row : t.rows) {
    CHECK(row.cases.size() == 4);
    CHECK(row.case2_mape == row.cases[1].mape());
    CHECK(row.case1_min_mape ==
          std::min({row.cases[0].per_level_reports[0].mape, row.cases[0].per_level_reports[1].mape,
                    row.cases[0].per_level_reports[2].mape}));
    CHECK(row.reduction_vs_case1_pct() == reduction_pct(row.case1_min_mape, row.case2_mape));
    for (const auto& c : row.cases) CHECK(c.weather == row.weather);
  }
  CHECK(compare_cases(f.data.dataset, f.data.profile, {}, f.config).rows.empty());
}
