#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracial/dynamics.hpp"
#include "tracial/observables.hpp"

namespace tracial {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Simulate, Correlations, Clt, Asclt, Deviation, ChaosCert, MixingClass, ModelCheck, KTheory };

std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s);

struct ConfigValue {
  std::string text;
  int line = 0;
};

using ConfigBlock = std::map<std::string, ConfigValue>;

struct ConfigError {
  int line = 0;  // 0 when the problem is a missing key or section
  std::string message;
};

std::string format_errors(const std::vector<ConfigError>& errors);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::uint64_t seed = 0;
  std::string name;
  std::string text;   // verbatim input
  std::string hash;   // FNV-1a of text, 16 hex digits
  std::map<std::string, ConfigBlock> blocks;

  std::optional<SystemSpec> system;
  std::optional<Observable> f, g;
  nlohmann::ordered_json system_params;    // as given, for the report
  nlohmann::ordered_json observable_params;
  nlohmann::ordered_json params;           // every parameter, defaults filled
  std::optional<std::string> output_dir;
};

struct ConfigParse {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
};

/// Sections `[name]` or `[name.sub]`, `key = value`, `#` comments.
ConfigParse parse_config(const std::string& text);

/// System from a [system] block; errors carry the block's line numbers.
std::optional<SystemSpec> system_from_block(const ConfigBlock& block, std::vector<ConfigError>& errors);

std::string fnv1a_hex(const std::string& text);

enum class Verdict { Pass, Fail };

struct RunResult {
  Verdict verdict = Verdict::Pass;
  nlohmann::ordered_json report;
  std::vector<std::string> files;  // relative to the output directory
  std::string summary;             // one line for the terminal
};

/// Runs the experiment and writes report.json, CSV series and manifest.json
/// into out_dir. Throws on I/O failure.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Same computation without touching the disk; `csv` receives file name to
/// contents.
RunResult compute_experiment(const ExperimentConfig& cfg, std::map<std::string, std::string>* csv = nullptr);

}  // namespace tracial
