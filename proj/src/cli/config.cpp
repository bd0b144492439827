#include "ddsc/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ddsc/bench/benchmark.hpp"

namespace ddsc::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int parse_int(const std::string& field, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(field, "expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& field, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& field, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double out = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + value + "'");
  }
}

bool parse_on_off(const std::string& field, const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw ConfigError(field, "expected on|off, got '" + value + "'");
}

std::vector<bench::Strategy> parse_strategies(const std::string& field,
                                              const std::string& value) {
  std::vector<bench::Strategy> out;
  for (const std::string& name : split_list(value)) {
    const auto strategy = bench::parse_strategy(name);
    if (!strategy) throw ConfigError(field, "unknown strategy '" + name + "'");
    out.push_back(*strategy);
  }
  if (out.empty()) throw ConfigError(field, "must name at least one strategy");
  return out;
}

// "N" means seeds 1..N; a comma list is taken verbatim.
std::vector<std::uint64_t> parse_seeds(const std::string& field, const std::string& value) {
  std::vector<std::uint64_t> out;
  if (value.find(',') == std::string::npos) {
    const std::uint64_t count = parse_u64(field, value);
    if (count == 0) throw ConfigError(field, "seed count must be at least 1");
    for (std::uint64_t s = 1; s <= count; ++s) out.push_back(s);
    return out;
  }
  for (const std::string& item : split_list(value)) {
    out.push_back(parse_u64(field, item));
  }
  if (out.empty()) throw ConfigError(field, "must name at least one seed");
  return out;
}

std::string strategies_to_string(const std::vector<bench::Strategy>& strategies) {
  std::string out;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    if (i > 0) out += ',';
    out += std::string(bench::strategy_name(strategies[i]));
  }
  return out;
}

std::string seeds_to_string(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(seeds[i]);
  }
  // A lone number would re-parse as a seed count; the trailing comma keeps
  // single-seed lists reading back as lists.
  if (seeds.size() == 1) out += ',';
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

// One entry per config key; resolve and format both walk this table so the
// two views cannot drift apart.
const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table{
      {"dataset.classes",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.classes = parse_int(k, v);
       }},
      {"dataset.train_devices",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.train_devices = parse_int(k, v);
       }},
      {"dataset.unseen_devices",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.unseen_devices = parse_int(k, v);
       }},
      {"dataset.raw_dim",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.raw_dim = parse_int(k, v);
       }},
      {"dataset.per_cell",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.per_cell = parse_int(k, v);
       }},
      {"dataset.shift_strength",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.shift_strength = parse_double(k, v);
       }},
      {"dataset.noise_sigma",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.noise_sigma = parse_double(k, v);
       }},
      {"dataset.label_fraction",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.label_fraction = parse_double(k, v);
       }},
      {"dataset.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.dataset.seed = parse_u64(k, v);
       }},
      {"schedule.epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.epochs = parse_int(k, v);
       }},
      {"schedule.lambda_min",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.lambda_min = parse_double(k, v);
       }},
      {"schedule.tau",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.tau = parse_double(k, v);
       }},
      {"schedule.beta",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.beta = parse_double(k, v);
       }},
      {"schedule.gamma",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.gamma = parse_double(k, v);
       }},
      {"schedule.eta_h",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.eta_h = parse_double(k, v);
       }},
      {"schedule.epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.schedule.epsilon = parse_double(k, v);
       }},
      {"trainer.embed_dim",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.trainer.embed_dim = parse_int(k, v);
       }},
      {"trainer.batch_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.trainer.batch_size = static_cast<std::size_t>(parse_int(k, v));
       }},
      {"trainer.learning_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.trainer.learning_rate = parse_double(k, v);
       }},
      {"run.strategies",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.strategies = parse_strategies(k, v);
       }},
      {"run.seeds",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench.seeds = parse_seeds(k, v);
       }},
      {"run.checkpoints",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.checkpoints = parse_on_off(k, v);
       }},
      {"run.out",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v.empty()) throw ConfigError(k, "missing value");
         c.out_dir = v;
       }},
  };
  return table;
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(line_number) +
                                      ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(config, key, value);
  }
}

std::string default_out_dir() {
  const char* root = std::getenv(kOutRootEnvVar);
  const std::string base = (root != nullptr && *root != '\0') ? root : ".";
  return base + "/ddsc_run";
}

RunConfig make_defaults() {
  RunConfig config;
  config.bench.strategies = {bench::Strategy::Ddsc, bench::Strategy::Uniform};
  config.bench.seeds.resize(20);
  for (std::size_t i = 0; i < config.bench.seeds.size(); ++i) {
    config.bench.seeds[i] = static_cast<std::uint64_t>(i + 1);
  }
  config.out_dir = default_out_dir();
  return config;
}

}  // namespace

RunConfig resolve_config(const Overrides& overrides) {
  RunConfig config = make_defaults();
  if (overrides.config_path) apply_config_file(config, *overrides.config_path);
  if (overrides.strategies) {
    config.bench.strategies = parse_strategies("run.strategies", *overrides.strategies);
  }
  if (overrides.seeds) config.bench.seeds = parse_seeds("run.seeds", *overrides.seeds);
  if (overrides.checkpoints) {
    config.checkpoints = parse_on_off("run.checkpoints", *overrides.checkpoints);
  }
  if (overrides.epochs) config.bench.schedule.epochs = *overrides.epochs;
  if (overrides.label_fraction) config.bench.dataset.label_fraction = *overrides.label_fraction;
  if (overrides.shift_strength) config.bench.dataset.shift_strength = *overrides.shift_strength;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  return config;
}

void validate_config(const RunConfig& config) {
  const auto& d = config.bench.dataset;
  if (d.classes < 2) throw ConfigError("dataset.classes", "must be at least 2");
  if (d.train_devices < 2) throw ConfigError("dataset.train_devices", "must be at least 2");
  if (d.unseen_devices < 1) throw ConfigError("dataset.unseen_devices", "must be at least 1");
  if (d.raw_dim < 1) throw ConfigError("dataset.raw_dim", "must be at least 1");
  if (d.per_cell < 1) throw ConfigError("dataset.per_cell", "must be at least 1");
  if (!(d.shift_strength >= 0.0)) {
    throw ConfigError("dataset.shift_strength", "must be non-negative");
  }
  if (!(d.noise_sigma >= 0.0)) throw ConfigError("dataset.noise_sigma", "must be non-negative");
  if (!(d.label_fraction > 0.0 && d.label_fraction <= 1.0)) {
    throw ConfigError("dataset.label_fraction", "out of (0, 1]");
  }

  const auto& s = config.bench.schedule;
  if (s.epochs < 1) throw ConfigError("schedule.epochs", "must be at least 1");
  if (!(s.lambda_min >= 0.0 && s.lambda_min < 1.0)) {
    throw ConfigError("schedule.lambda_min", "out of [0,1)");
  }
  if (!(s.tau > 0.0)) throw ConfigError("schedule.tau", "must be positive");
  if (!(s.beta > 0.0 && s.beta < 1.0)) throw ConfigError("schedule.beta", "out of (0,1)");
  if (!(s.gamma > 0.0 && s.gamma <= 1.0)) throw ConfigError("schedule.gamma", "out of (0,1]");
  if (!(s.eta_h > 0.0 && s.eta_h < 1.0)) throw ConfigError("schedule.eta_h", "out of (0,1)");
  if (!(s.epsilon > 0.0)) throw ConfigError("schedule.epsilon", "must be positive");

  const auto& t = config.bench.trainer;
  if (t.embed_dim < 1) throw ConfigError("trainer.embed_dim", "must be at least 1");
  if (t.batch_size < 1) throw ConfigError("trainer.batch_size", "must be at least 1");
  if (!(t.learning_rate > 0.0)) throw ConfigError("trainer.learning_rate", "must be positive");

  if (config.bench.strategies.empty()) {
    throw ConfigError("run.strategies", "must name at least one strategy");
  }
  if (config.bench.seeds.empty()) throw ConfigError("run.seeds", "must name at least one seed");
  if (config.out_dir.empty()) throw ConfigError("run.out", "must not be empty");
}

std::string format_resolved(const RunConfig& config) {
  std::ostringstream out;
  out << "# ddsc resolved configuration\n";
  out << "dataset.classes = " << config.bench.dataset.classes << "\n";
  out << "dataset.train_devices = " << config.bench.dataset.train_devices << "\n";
  out << "dataset.unseen_devices = " << config.bench.dataset.unseen_devices << "\n";
  out << "dataset.raw_dim = " << config.bench.dataset.raw_dim << "\n";
  out << "dataset.per_cell = " << config.bench.dataset.per_cell << "\n";
  out << "dataset.shift_strength = " << bench::format_double6(config.bench.dataset.shift_strength)
      << "\n";
  out << "dataset.noise_sigma = " << bench::format_double6(config.bench.dataset.noise_sigma)
      << "\n";
  out << "dataset.label_fraction = " << bench::format_double6(config.bench.dataset.label_fraction)
      << "\n";
  out << "dataset.seed = " << config.bench.dataset.seed << "\n";
  out << "schedule.epochs = " << config.bench.schedule.epochs << "\n";
  out << "schedule.lambda_min = " << bench::format_double6(config.bench.schedule.lambda_min)
      << "\n";
  out << "schedule.tau = " << bench::format_double6(config.bench.schedule.tau) << "\n";
  out << "schedule.beta = " << bench::format_double6(config.bench.schedule.beta) << "\n";
  out << "schedule.gamma = " << bench::format_double6(config.bench.schedule.gamma) << "\n";
  out << "schedule.eta_h = " << bench::format_double6(config.bench.schedule.eta_h) << "\n";
  out << "schedule.epsilon = " << bench::format_double6(config.bench.schedule.epsilon) << "\n";
  out << "trainer.embed_dim = " << config.bench.trainer.embed_dim << "\n";
  out << "trainer.batch_size = " << config.bench.trainer.batch_size << "\n";
  out << "trainer.learning_rate = " << bench::format_double6(config.bench.trainer.learning_rate)
      << "\n";
  out << "run.strategies = " << strategies_to_string(config.bench.strategies) << "\n";
  out << "run.seeds = " << seeds_to_string(config.bench.seeds) << "\n";
  out << "run.checkpoints = " << (config.checkpoints ? "on" : "off") << "\n";
  out << "run.out = " << config.out_dir << "\n";
  return out.str();
}

}  // namespace ddsc::cli
