#include "ddsc/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <vector>

#include "ddsc/bench/benchmark.hpp"
#include "ddsc/checkpoint.hpp"

namespace ddsc::cli {

namespace fs = std::filesystem;

namespace {

void prepare_out_dir(const std::string& out_dir) {
  const fs::path path(out_dir);
  if (fs::exists(path)) {
    if (!fs::is_directory(path)) {
      throw ConfigError("run.out", "'" + out_dir + "' exists and is not a directory");
    }
    if (!fs::is_empty(path)) {
      throw ConfigError("run.out", "refusing to write into non-empty directory '" +
                                       out_dir + "'");
    }
  } else {
    fs::create_directories(path);
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

int cmd_run(const Overrides& overrides, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = resolve_config(overrides);
    validate_config(config);
    prepare_out_dir(config.out_dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.field() << ": " << e.what() << "\n";
    return 2;
  }

  try {
    bench::BenchmarkConfig bench_config = config.bench;
    if (config.checkpoints) {
      const fs::path dir = fs::path(config.out_dir) / "checkpoints";
      fs::create_directories(dir);
      bench_config.checkpoint_dir = dir.string();
    }

    const bench::BenchmarkReport report = bench::run_benchmark(bench_config);

    write_file(fs::path(config.out_dir) / "resolved_config.txt", format_resolved(config));
    {
      std::ofstream csv(fs::path(config.out_dir) / "curves.csv");
      if (!csv) throw std::runtime_error("cannot write curves.csv");
      bench::write_curves_csv(csv, report.rows, /*timestamp_header=*/true);
    }
    {
      std::ofstream summary(fs::path(config.out_dir) / "summary.txt");
      if (!summary) throw std::runtime_error("cannot write summary.txt");
      bench::write_summary(summary, report);
    }

    out << "wrote " << config.out_dir << " (" << report.rows.size() << " curve rows, "
        << report.summary.size() << " strategies)\n";
    return 0;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_inspect(const std::string& checkpoint_path, std::ostream& out, std::ostream& err) {
  CurriculumState state;
  try {
    state = load_checkpoint(checkpoint_path);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }

  const std::size_t n = state.ledger.size();
  out << "checkpoint: " << checkpoint_path << "\n";
  out << "completed epochs: " << state.epoch << " of " << state.config.epochs << "\n";
  out << "weights ready for epoch " << std::min(state.epoch + 1, state.config.epochs)
      << ", lambda = " << bench::format_double6(state.next_lambda) << "\n";

  out << "prototypes (" << state.bank.device_count() << " devices, "
      << state.bank.seen_count() << " seen), norms:";
  for (std::size_t m = 0; m < state.bank.device_count(); ++m) {
    if (state.bank.seen[m]) {
      out << " " << bench::format_double6(l2_norm(state.bank.prototypes[m]));
    } else {
      out << " unseen";
    }
  }
  out << "\n";

  const WeightStats stats = weight_stats(state.ledger.weights());
  out << "weight quantiles: min " << bench::format_double6(stats.min) << ", q25 "
      << bench::format_double6(stats.q25) << ", median "
      << bench::format_double6(stats.median) << ", q75 "
      << bench::format_double6(stats.q75) << ", max " << bench::format_double6(stats.max)
      << ", entropy " << bench::format_double6(stats.entropy) << "\n";

  std::vector<std::size_t> ranked(n);
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return state.ledger.weight(a) > state.ledger.weight(b);
  });
  const std::size_t show = std::min<std::size_t>(5, n);

  auto print_sample = [&](std::size_t i) {
    out << "  sample " << i << ": weight " << bench::format_double6(state.ledger.weight(i));
    const auto invariance = state.ledger.invariance(i);
    out << ", invariance ";
    if (invariance.has_value()) {
      out << bench::format_double6(*invariance);
    } else {
      out << "unscored";
    }
    out << ", progress " << bench::format_double6(state.ledger.progress(i)) << "\n";
  };

  out << "top weighted:\n";
  for (std::size_t r = 0; r < show; ++r) print_sample(ranked[r]);
  out << "bottom weighted:\n";
  for (std::size_t r = 0; r < show; ++r) print_sample(ranked[n - 1 - r]);
  return 0;
}

int cmd_validate(const Overrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = resolve_config(overrides);
    validate_config(config);
    out << format_resolved(config);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.field() << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ddsc::cli
