#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ddsc/bench/benchmark.hpp"

namespace ddsc::cli {

// Validation failure carrying the offending config field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  bench::BenchmarkConfig bench;  // dataset, schedule, trainer, strategies, seeds
  bool checkpoints = false;
  std::string out_dir;
};

// Command-line overrides; anything set here wins over the config file.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> strategies;  // comma list
  std::optional<std::string> seeds;       // count or comma list
  std::optional<std::string> checkpoints;  // on|off
  std::optional<int> epochs;
  std::optional<double> label_fraction;
  std::optional<double> shift_strength;
};

// Defaults -> config file -> flag overrides. File syntax is one flat dotted
// key per line, `key = value`, with `#` comments. Unknown keys are rejected
// by name. Does not validate ranges; call validate_config afterwards.
RunConfig resolve_config(const Overrides& overrides);

// Field-level range checks; throws ConfigError naming the first bad field.
void validate_config(const RunConfig& config);

// The effective config in file syntax, defaults resolved, seeds explicit.
// parse/format round-trips.
std::string format_resolved(const RunConfig& config);

// Default output root comes from this environment variable when set.
constexpr const char* kOutRootEnvVar = "DDSC_OUT_ROOT";

}  // namespace ddsc::cli
