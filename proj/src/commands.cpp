#include "pvfc/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pvfc/clearsky.hpp"
#include "pvfc/csv_io.hpp"
#include "pvfc/error.hpp"
#include "pvfc/pipeline.hpp"
#include "pvfc/preprocess.hpp"
#include "pvfc/report.hpp"
#include "pvfc/run_config.hpp"
#include "pvfc/synth.hpp"

namespace pvfc::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string input;
  bool trim_to_overlap = false;
};

struct Loaded {
  MultiLevelDataset dataset;
  clearsky::ClearSkyProfile profile;
};

config::RunConfig resolve(const Globals& g) {
  config::RunConfig cfg;
  if (!g.config_path.empty()) {
    try {
      cfg = config::load(g.config_path);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    // Relative input paths in a config file are relative to that file.
    if (!cfg.input.empty() && fs::path(cfg.input).is_relative()) {
      cfg.input = (fs::path(g.config_path).parent_path() / cfg.input).string();
    }
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.out = *g.out;
  if (!g.input.empty()) cfg.input = g.input;
  cfg.pipeline.seed = cfg.seed;
  cfg.synth.seed = cfg.seed;
  return cfg;
}

Loaded load_input(const config::RunConfig& cfg, bool trim) {
  if (cfg.input.empty()) throw UsageError("no input dataset (use --input or set `input` in the config)");
  const SiteConfig site(cfg.site);
  auto dataset = csv::to_dataset(csv::load_csv(cfg.input), site, trim);
  auto profile = clearsky::clearsky_profile(site, dataset.start(), dataset.size());
  return {std::move(dataset), std::move(profile)};
}

std::size_t day_count(const MultiLevelDataset& d) { return d.size() / 24; }

std::size_t pick_day(const std::optional<std::size_t>& day, const MultiLevelDataset& d) {
  const std::size_t n = day_count(d);
  if (n == 0) throw Error(ErrorCode::TooShort, "dataset holds less than one day");
  if (!day) return n - 1;
  if (*day >= n) throw UsageError("--day " + std::to_string(*day) + " is past the last day " + std::to_string(n - 1));
  return *day;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

int run_clearsky(const config::RunConfig& cfg, const std::string& start, std::size_t hours, std::ostream& out) {
  const UtcHour t0 = start.empty() ? cfg.synth.start : UtcHour::parse_iso(start);
  const auto profile = clearsky::clearsky_profile(SiteConfig(cfg.site), t0, hours);
  std::ostringstream s;
  csv::write_profile(s, profile);
  const auto path = fs::path(cfg.out) / "clearsky.csv";
  write_text(path, s.str());
  out << path.string() << '\n';
  return kExitOk;
}

int run_synth(const config::RunConfig& cfg, std::ostream& out) {
  const auto result = synth::gen_dataset(cfg.synth, SiteConfig(cfg.site));
  const fs::path dir(cfg.out);
  const auto& ds = result.dataset;
  csv::write_csv(dir / "dataset.csv", {ds.customer(), ds.feeder(), ds.substation()});

  std::ostringstream sched;
  sched << "day,weather\n";
  for (std::size_t i = 0; i < result.schedule.size(); ++i) sched << i << ',' << to_string(result.schedule[i]) << '\n';
  write_text(dir / "schedule.csv", sched.str());

  // A config that runs the pipeline on this dataset as generated.
  config::RunConfig run = cfg;
  run.input = "dataset.csv";
  run.out = "out";
  run.pipeline.level_scale = result.level_scale;
  write_text(dir / "run.cfg", "# written by `pvfc synth`; input is relative to this file\n" + config::to_text(run));
  out << (dir / "dataset.csv").string() << '\n';
  return kExitOk;
}

int run_preprocess(const config::RunConfig& cfg, bool trim, std::ostream& out) {
  const auto [ds, profile] = load_input(cfg, trim);
  std::ostringstream rows;
  std::ostringstream summary;
  rows << "timestamp_utc,level,is_day,clearsky_kw,clearsky_index\n";
  summary << "level,offset_kw,day_hours,clip_count,negative_count,over_rating_count,nan_count,usable\n";
  for (auto level : kAllLevels) {
    const auto site = cfg.pipeline.level_site(ds.site(), level);
    auto prof = profile;
    for (double& v : prof.power_kw) v *= cfg.pipeline.level_scale[level_index(level)];
    const auto& series = ds.level(level);
    const auto check = validate_series(series, site);
    const auto pre = preprocess::preprocess(series, prof, site, cfg.pipeline.prep);
    std::size_t k = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      rows << (series.start() + static_cast<std::int64_t>(i)).iso() << ',' << to_string(level) << ','
           << (pre.day_mask[i] ? 1 : 0) << ',' << csv::format_double(prof.power_kw[i]) << ',';
      if (pre.day_mask[i]) rows << csv::format_double(pre.index_values[k++]);
      rows << '\n';
    }
    summary << to_string(level) << ',' << csv::format_double(pre.offset_kw) << ',' << pre.index_values.size() << ','
            << pre.clip_count << ',' << check.negative_count << ',' << check.over_rating_count << ','
            << check.nan_count << ',' << (check.usable ? 1 : 0) << '\n';
  }
  const fs::path dir(cfg.out);
  write_text(dir / "preprocessed.csv", rows.str());
  write_text(dir / "preprocess_summary.csv", summary.str());
  out << (dir / "preprocessed.csv").string() << '\n';
  return kExitOk;
}

int run_fit(const config::RunConfig& cfg, bool trim, std::optional<std::size_t> day, std::ostream& out) {
  const auto [ds, profile] = load_input(cfg, trim);
  const auto models = pipeline::build_fitting_models(ds, profile, pick_day(day, ds), cfg.pipeline);
  report::write_fit(models, cfg.out);
  out << (fs::path(cfg.out) / "fit.csv").string() << '\n';
  return kExitOk;
}

std::vector<pipeline::CaseId> parse_cases(const std::string& which) {
  using pipeline::CaseId;
  if (which == "all") return {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4};
  if (which.size() == 1 && which[0] >= '1' && which[0] <= '4') return {static_cast<CaseId>(which[0] - '0')};
  throw UsageError("--case must be 1, 2, 3, 4 or all");
}

int run_forecast(const config::RunConfig& cfg, bool trim, std::optional<std::size_t> day, const std::string& which,
                 std::ostream& out) {
  const auto cases = parse_cases(which);
  const auto [ds, profile] = load_input(cfg, trim);
  pipeline::DayContext ctx(ds, profile, pick_day(day, ds), cfg.pipeline);
  for (auto id : cases) out << report::write_case(pipeline::run_case(id, ctx), cfg.out).string() << '\n';
  return kExitOk;
}

int run_cases(const config::RunConfig& cfg, bool trim, std::ostream& out, std::ostream& err) {
  const auto [ds, profile] = load_input(cfg, trim);
  std::vector<std::size_t> days;
  const std::size_t n = day_count(ds);
  for (std::size_t d = cfg.first_day; d < n && d <= cfg.last_day; ++d) {
    if (d * 24 >= kMinUsableHours) days.push_back(d);
  }
  const auto table = pipeline::compare_cases(ds, profile, days, cfg.pipeline);
  const bool any = report::write_comparison(table, cfg.out);
  for (auto w : table.missing) err << "no " << to_string(w) << " day among the candidate days\n";
  out << (fs::path(cfg.out) / "cases.csv").string() << '\n';
  if (!any) {
    err << "no valid forecast days\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_plotdata(const config::RunConfig& cfg, bool trim, std::optional<std::size_t> day, const std::string& which,
                 std::ostream& out) {
  const auto cases = parse_cases(which);
  if (cases.size() != 1) throw UsageError("plotdata takes a single --case");
  const auto [ds, profile] = load_input(cfg, trim);
  pipeline::DayContext ctx(ds, profile, pick_day(day, ds), cfg.pipeline);
  const auto result = pipeline::run_case(cases[0], ctx);
  const auto path = fs::path(cfg.out) / ("plotdata_" + std::string(pipeline::to_string(result.case_id)) + "_" +
                                         std::string(to_string(result.weather)) + ".csv");
  report::write_plotdata(ctx.actual_day(result.forecast.level()), result.forecast, path);
  out << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int cmd_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Day-ahead PV forecasting from multi-level measurements", "pvfc"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "root seed (overrides the config)");
  app.add_option("--out", g.out, "output directory (overrides the config)");
  app.add_flag("--trim-to-overlap", g.trim_to_overlap, "cut the three levels to their common hours");

  std::string start;
  std::size_t hours = 24;
  std::optional<std::size_t> day;
  std::string which = "all";
  std::string plot_case = "2";

  auto* cs = app.add_subcommand("clearsky", "write the clear-sky profile");
  cs->add_option("--start", start, "first hour, ISO-8601 UTC (default: synth.start)");
  cs->add_option("--hours", hours, "profile length")->check(CLI::PositiveNumber);

  app.add_subcommand("synth", "generate a synthetic three-level dataset");

  auto* pre = app.add_subcommand("preprocess", "clear-sky index and day mask per level");
  auto* fit = app.add_subcommand("fit", "per-level fitting models and their quality");
  auto* fc = app.add_subcommand("forecast", "day-ahead forecast for one day");
  auto* cases = app.add_subcommand("cases", "compare the four cases per weather class");
  auto* plot = app.add_subcommand("plotdata", "actual vs forecast for one day");
  for (auto* sub : {pre, fit, fc, cases, plot}) sub->add_option("--input", g.input, "dataset CSV");
  for (auto* sub : {fit, fc, plot}) sub->add_option("--day", day, "forecast day, 24 h blocks from the start (default: last)");
  fc->add_option("--case", which, "1, 2, 3, 4 or all");
  plot->add_option("--case", plot_case, "1, 2, 3 or 4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pvfc: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const auto cfg = resolve(g);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "clearsky") return run_clearsky(cfg, start, hours, out);
    if (name == "synth") return run_synth(cfg, out);
    if (name == "preprocess") return run_preprocess(cfg, g.trim_to_overlap, out);
    if (name == "fit") return run_fit(cfg, g.trim_to_overlap, day, out);
    if (name == "forecast") return run_forecast(cfg, g.trim_to_overlap, day, which, out);
    if (name == "cases") return run_cases(cfg, g.trim_to_overlap, out, err);
    if (name == "plotdata") return run_plotdata(cfg, g.trim_to_overlap, day, plot_case, out);
    err << "pvfc: unknown subcommand " << name << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "pvfc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "pvfc: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "pvfc: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace pvfc::cli
