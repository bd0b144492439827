#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddsc/invariance.hpp"
#include "ddsc/progress.hpp"
#include "ddsc/schedule.hpp"

namespace ddsc {

struct SampleMeta {
  int device = 0;
  int label = 0;
};

// Contract a backbone fulfils for the engine. embed() returns detached
// features (no gradient path back into the model); per_sample_loss() must be
// finite for every training sample; apply_weighted_step() performs one
// optimization step on the weighted batch loss. embed and per_sample_loss
// must not mutate observable trainer state.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::vector<double> embed(std::size_t sample) = 0;
  virtual double per_sample_loss(std::size_t sample) = 0;
  virtual void apply_weighted_step(
      std::span<const std::pair<std::size_t, double>> batch) = 0;
};

struct WeightStats {
  double entropy = 0.0;  // H(pi)/log(N); 1 means uniform
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};
WeightStats weight_stats(std::span<const double> weights);

struct EpochReport {
  int epoch = 0;
  double lambda = 0.0;         // schedule value at this epoch
  double weighted_loss = 0.0;  // sum of pi_i * loss_i over the epoch
  WeightStats stats;           // of the weights used this epoch
  std::vector<double> weights;
};

// Everything needed to resume a run at an epoch boundary. The ledger's
// weights are always the ready-to-use weights for epoch `epoch + 1`.
struct CurriculumState {
  int epoch = 0;  // completed epochs
  std::uint64_t seed = 1;
  std::size_t batch_size = 16;
  ScheduleConfig config;
  std::vector<SampleMeta> samples;
  PrototypeBank bank;
  SampleLedger ledger;
  double next_lambda = 1.0;
};

// Seeded per-epoch visitation order, shared by the engine and by baseline
// training loops so that runs with the same seed iterate identically.
std::vector<std::size_t> epoch_order(std::uint64_t seed, int epoch, std::size_t count);

// Epoch loop driver: uniform weights on the first epoch, weighted batches
// afterwards, and the end-of-epoch update block (loss finalization,
// prototype refresh, entropy scoring, min-max normalization, fusion into
// next-epoch weights).
//
// The epoch loop is sequential. Scoring against the bank is pure; the bank
// and ledger are only mutated inside run_epoch's update block.
class CurriculumEngine {
 public:
  CurriculumEngine(ScheduleConfig config, std::vector<SampleMeta> samples,
                   int device_count, std::uint64_t seed, std::size_t batch_size = 16);
  explicit CurriculumEngine(CurriculumState state);

  // Runs epoch state().epoch + 1. Throws if training is already complete.
  EpochReport run_epoch(Trainer& trainer);

  // Runs remaining epochs up to config.epochs. Exceptions are rethrown with
  // the failing epoch index attached.
  std::vector<EpochReport> run_training(Trainer& trainer);

  const CurriculumState& state() const noexcept { return state_; }

 private:
  CurriculumState state_;
  bool warned_degenerate_devices_ = false;
};

}  // namespace ddsc
