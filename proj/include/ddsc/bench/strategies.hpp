#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddsc/bench/backbone.hpp"
#include "ddsc/bench/synthetic.hpp"
#include "ddsc/schedule.hpp"

namespace ddsc::bench {

// Weighting policy under test. All strategies train the same backbone over
// the same seeded batch order; only the per-epoch weight vector differs.
enum class Strategy {
  Ddsc,           // full dual-signal engine
  Uniform,        // 1/N always
  StaticEntropy,  // entropy ranking frozen after a warm-up epoch, widening exposure
  SelfPaced,      // low-loss samples first, loss threshold relaxing over epochs
};

std::optional<Strategy> parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy strategy);
const std::vector<Strategy>& all_strategies();

struct TrainOptions {
  std::size_t batch_size = 16;
  double learning_rate = 0.3;
  int embed_dim = 16;
};

struct CurveRow {
  std::string strategy;
  std::uint64_t seed = 0;
  int epoch = 0;
  double lambda = 0.0;  // 0 for strategies without a mixing schedule
  double train_loss = 0.0;
  double acc_overall = 0.0;
  double acc_seen = 0.0;
  double acc_unseen = 0.0;
  double weight_entropy = 0.0;
};

struct SplitAccuracy {
  double overall = 0.0;
  double seen = 0.0;
  double unseen = 0.0;
};
SplitAccuracy evaluate_on_test(const ToyBackbone& backbone, const Dataset& dataset);

struct RunResult {
  std::vector<CurveRow> rows;
  SplitAccuracy final_accuracy;
};

// Trains one (strategy, seed) pair on an already-standardized dataset.
// Deterministic in (strategy, schedule, options, seed). checkpoint_dir, when
// non-empty, receives per-epoch engine checkpoints (meaningful for Ddsc
// only; other strategies carry no curriculum state).
RunResult run_strategy(Strategy strategy, const Dataset& dataset,
                       const ScheduleConfig& schedule, const TrainOptions& options,
                       std::uint64_t seed, const std::string& checkpoint_dir = "");

// Exposure fraction shared by the staged baselines: linear from 0.3 at the
// first epoch to exactly 1.0 at the last.
double exposure_fraction(int epoch, int total_epochs);

// Weight plans of the two staged baselines, exposed for direct testing.
// Entropy ranking is computed once from warm-up embeddings and frozen; ties
// at the exposure cut break by ascending sample index.
std::vector<double> static_entropy_weights(const std::vector<double>& frozen_entropy,
                                           int epoch, int total_epochs);
std::vector<double> self_paced_weights(const std::vector<double>& previous_losses,
                                       int epoch, int total_epochs);

}  // namespace ddsc::bench
