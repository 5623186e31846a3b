#include "pvfc/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "pvfc/error.hpp"

namespace pvfc::config {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidArgument, "bad value '" + value + "' for key " + key);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value);
  return out;
}

template <typename T>
std::string text(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    char buf[32];  // shortest text that parses back to the same double
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  } else {
    return std::to_string(v);
  }
}

struct Entry {
  const char* key;
  const char* help;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Entry number(const char* key, const char* help, Member member) {
  return Entry{key, help,
               [member](RunConfig& c, const std::string& k, const std::string& v) {
                 auto& field = member(c);
                 field = parse_number<std::remove_reference_t<decltype(field)>>(k, v);
               },
               [member](const RunConfig& c) { return text(member(const_cast<RunConfig&>(c))); }};
}

#define PVFC_FIELD(expr) [](RunConfig& c) -> auto& { return expr; }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(Entry{"input", "dataset CSV path",
                      [](RunConfig& c, const std::string&, const std::string& v) { c.input = v; },
                      [](const RunConfig& c) { return c.input; }});
    t.push_back(Entry{"out", "output directory",
                      [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
                      [](const RunConfig& c) { return c.out; }});
    t.push_back(number("seed", "root seed", PVFC_FIELD(c.seed)));
    t.push_back(number("first_day", "first forecast day scanned by cases", PVFC_FIELD(c.first_day)));
    t.push_back(number("last_day", "last forecast day scanned by cases", PVFC_FIELD(c.last_day)));

    t.push_back(number("site.latitude", "degrees north", PVFC_FIELD(c.site.latitude)));
    t.push_back(number("site.longitude", "degrees east", PVFC_FIELD(c.site.longitude)));
    t.push_back(number("site.tz_offset", "hours from UTC (metadata)", PVFC_FIELD(c.site.tz_offset)));
    t.push_back(number("site.dc_rating", "kW, per customer-level unit", PVFC_FIELD(c.site.dc_rating)));
    t.push_back(number("site.ac_rating", "kW, per customer-level unit", PVFC_FIELD(c.site.ac_rating)));
    t.push_back(number("site.system_efficiency", "derate in (0, 1]", PVFC_FIELD(c.site.system_efficiency)));

    t.push_back(number("network.delay_d", "tapped delay length", PVFC_FIELD(c.pipeline.network.delay_d)));
    t.push_back(number("network.hidden_width", "hidden tanh units", PVFC_FIELD(c.pipeline.network.hidden_width)));
    t.push_back(number("network.max_epochs", "training epoch cap", PVFC_FIELD(c.pipeline.network.max_epochs)));
    t.push_back(number("network.step_size", "Adam step size", PVFC_FIELD(c.pipeline.network.step_size)));
    t.push_back(number("network.early_stop_patience", "epochs without improvement before stopping",
                       PVFC_FIELD(c.pipeline.network.early_stop_patience)));
    t.push_back(number("network.early_stop_delta", "minimum loss improvement",
                       PVFC_FIELD(c.pipeline.network.early_stop_delta)));

    t.push_back(Entry{"pipeline.target_level", "customer | feeder | substation",
                      [](RunConfig& c, const std::string& k, const std::string& v) {
                        try {
                          c.pipeline.target_level = parse_level(v);
                        } catch (const Error&) {
                          bad_value(k, v);
                        }
                      },
                      [](const RunConfig& c) { return std::string(to_string(c.pipeline.target_level)); }});
    t.push_back(number("pipeline.epsilon_fraction", "MAPE exclusion threshold, fraction of ac rating",
                       PVFC_FIELD(c.pipeline.epsilon_fraction)));
    t.push_back(number("pipeline.day_threshold", "day hour if clear-sky power >= this fraction of ac rating",
                       PVFC_FIELD(c.pipeline.prep.day_threshold_fraction)));
    t.push_back(number("pipeline.kappa_max", "clear-sky index clip", PVFC_FIELD(c.pipeline.prep.kappa_max)));
    t.push_back(number("pipeline.max_retries", "extra NARX trainings when the target is missed",
                       PVFC_FIELD(c.pipeline.max_retries)));
    t.push_back(number("pipeline.sunny_threshold", "mean index >= this is sunny",
                       PVFC_FIELD(c.pipeline.sunny_threshold)));
    t.push_back(number("pipeline.cloudy_threshold", "mean index <= this is cloudy",
                       PVFC_FIELD(c.pipeline.cloudy_threshold)));
    t.push_back(number("pipeline.scale.customer", "customer nameplate, multiple of the site rating",
                       PVFC_FIELD(c.pipeline.level_scale[0])));
    t.push_back(number("pipeline.scale.feeder", "feeder nameplate, multiple of the site rating",
                       PVFC_FIELD(c.pipeline.level_scale[1])));
    t.push_back(number("pipeline.scale.substation", "substation nameplate, multiple of the site rating",
                       PVFC_FIELD(c.pipeline.level_scale[2])));

    t.push_back(number("synth.n_customers", "customers", PVFC_FIELD(c.synth.n_customers)));
    t.push_back(number("synth.n_feeders", "feeders", PVFC_FIELD(c.synth.n_feeders)));
    t.push_back(number("synth.monitored_feeders", "feeders summed into the feeder level",
                       PVFC_FIELD(c.synth.monitored_feeders)));
    t.push_back(number("synth.days", "days to generate", PVFC_FIELD(c.synth.days)));
    t.push_back(number("synth.ar_rho", "customer AR(1) coefficient", PVFC_FIELD(c.synth.ar_rho)));
    t.push_back(number("synth.loss_fraction", "substation line loss", PVFC_FIELD(c.synth.loss_fraction)));
    t.push_back(number("synth.meter_noise_sd", "kW", PVFC_FIELD(c.synth.meter_noise_sd)));
    t.push_back(number("synth.persistence", "probability a day repeats the previous regime",
                       PVFC_FIELD(c.synth.persistence)));
    t.push_back(number("synth.field_rho", "cloud field AR(1) coefficient", PVFC_FIELD(c.synth.field_rho)));
    t.push_back(number("synth.field_sigma_scale", "cloud field innovation, multiple of the regime sigma",
                       PVFC_FIELD(c.synth.field_sigma_scale)));
    t.push_back(number("synth.lead_step_hours", "day hours by which monitored feeder j+1 leads feeder j",
                       PVFC_FIELD(c.synth.lead_step_hours)));
    t.push_back(number("synth.far_lead_hours", "lead of the unmonitored feeders in day hours",
                       PVFC_FIELD(c.synth.far_lead_hours)));
    t.push_back(Entry{"synth.feeder_leads", "comma-separated lead per feeder in day hours; empty uses the two lead keys",
                      [](RunConfig& c, const std::string& k, const std::string& v) {
                        std::vector<std::size_t> leads;
                        std::stringstream in(v);
                        for (std::string item; std::getline(in, item, ',');) {
                          const auto b = item.find_first_not_of(' ');
                          const auto e = item.find_last_not_of(' ');
                          if (b == std::string::npos) bad_value(k, v);
                          leads.push_back(parse_number<std::size_t>(k, item.substr(b, e - b + 1)));
                        }
                        c.synth.feeder_lead_hours = std::move(leads);
                      },
                      [](const RunConfig& c) {
                        std::string s;
                        for (std::size_t i = 0; i < c.synth.feeder_lead_hours.size(); ++i) {
                          s += (i ? "," : "") + std::to_string(c.synth.feeder_lead_hours[i]);
                        }
                        return s;
                      }});
    t.push_back(Entry{"synth.start", "first hour, ISO-8601 UTC",
                      [](RunConfig& c, const std::string& k, const std::string& v) {
                        try {
                          c.synth.start = UtcHour::parse_iso(v);
                        } catch (const Error&) {
                          bad_value(k, v);
                        }
                      },
                      [](const RunConfig& c) { return c.synth.start.iso(); }});
    return t;
  }();
  return table;
}

#undef PVFC_FIELD

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(cfg, key, value);
      return;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

RunConfig parse(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply(cfg, trim(content.substr(0, eq)), trim(content.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), source + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  return cfg;
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  return parse(in, path.string());
}

std::string to_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
  return out;
}

std::vector<KeyInfo> describe() {
  const RunConfig defaults;
  std::vector<KeyInfo> out;
  for (const auto& e : entries()) out.push_back({e.key, e.get(defaults), e.help});
  return out;
}

}  // namespace pvfc::config
