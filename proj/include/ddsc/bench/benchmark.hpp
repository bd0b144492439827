#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddsc/bench/strategies.hpp"
#include "ddsc/bench/synthetic.hpp"
#include "ddsc/schedule.hpp"

namespace ddsc::bench {

struct BenchmarkConfig {
  SyntheticSpec dataset;
  ScheduleConfig schedule;
  TrainOptions trainer;
  std::vector<Strategy> strategies;
  std::vector<std::uint64_t> seeds;
  std::string checkpoint_dir;  // empty disables checkpoints
};

struct StrategySummary {
  std::string strategy;
  std::size_t runs = 0;
  double mean_overall = 0.0, std_overall = 0.0;
  double mean_seen = 0.0, std_seen = 0.0;
  double mean_unseen = 0.0, std_unseen = 0.0;
};

struct BenchmarkReport {
  std::vector<CurveRow> rows;          // sorted by (strategy, seed, epoch)
  std::vector<StrategySummary> summary;  // sorted by strategy name
};

// Runs every (strategy, seed) pair. Each seed draws a fresh dataset and a
// fresh backbone initialization shared by all strategies, so comparisons
// are paired. Failures are rethrown tagged with (strategy, seed).
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

// CSV schema, fixed: strategy,seed,epoch,lambda,train_loss,acc_overall,
// acc_seen,acc_unseen,weight_entropy. Floats print with 6 significant
// digits. The optional timestamp is a single leading comment line so
// determinism checks can skip it.
void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows,
                      bool timestamp_header);
void write_summary(std::ostream& out, const BenchmarkReport& report);

std::string format_double6(double value);

}  // namespace ddsc::bench
