#pragma once

// Plain key = value run configuration. Blank lines and lines starting with
// '#' are ignored; unknown keys are errors. Every key has a default, so an
// empty file is a valid configuration. `describe()` lists the schema.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pvfc/core_model.hpp"
#include "pvfc/pipeline.hpp"
#include "pvfc/synth.hpp"

namespace pvfc::config {

struct RunConfig {
  SiteConfig::Params site;
  pipeline::PipelineConfig pipeline;
  synth::SynthConfig synth;
  std::string input;        ///< dataset CSV
  std::string out = "out";  ///< output directory
  std::uint64_t seed = 1;   ///< root seed for pipeline and synth
  /// First and last forecast day (0-based 24 h blocks) scanned by `cases`.
  std::size_t first_day = 30;
  std::size_t last_day = 1000000;
};

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Sets one key. Throws Error(InvalidArgument) on unknown keys or bad values.
void apply(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse(std::istream& in, const std::string& source = "<stream>");
RunConfig load(const std::filesystem::path& path);

/// Current values of every key, one `key = value` line each; parse() of the
/// result reproduces `cfg`.
std::string to_text(const RunConfig& cfg);

std::vector<KeyInfo> describe();

}  // namespace pvfc::config
