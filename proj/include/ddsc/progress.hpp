#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ddsc {

// Per-sample running state behind the learning-progress signal, plus the
// fused score and weight slots the scheduler fills in. One instance covers
// the whole training set; sample indices are stable across epochs.
//
// Epoch protocol: any number of record_loss calls, then exactly one
// finalize_epoch_losses, then normalize_progress. A sample with no
// recordings in an epoch keeps its previous loss and registers zero
// instantaneous change, so its smoothed change only decays.
class SampleLedger {
 public:
  SampleLedger() = default;
  explicit SampleLedger(std::size_t sample_count);

  std::size_t size() const noexcept { return cells_.size(); }
  int finalized_epochs() const noexcept { return finalized_epochs_; }

  // Accumulates one observed loss into the sample's running epoch mean.
  // Non-finite losses are rejected loudly; averaging them away would hide
  // training instability.
  void record_loss(std::size_t sample, double loss);

  // Closes the epoch: fixes each sample's epoch-mean loss, folds the
  // absolute change against the previous epoch into the EMA, and resets the
  // accumulators. The first finalized epoch registers zero change for every
  // sample.
  void finalize_epoch_losses(double beta);

  // Min-max normalization of the smoothed changes across all samples.
  // epsilon guards the all-equal case, which maps everything to zero.
  void normalize_progress(double epsilon);

  double previous_loss(std::size_t sample) const;
  double loss_change(std::size_t sample) const;            // smoothed |delta|
  double progress(std::size_t sample) const;               // normalized, in [0, 1]
  std::optional<double> invariance(std::size_t sample) const;
  double score(std::size_t sample) const;
  double weight(std::size_t sample) const;

  void set_invariance(std::size_t sample, double value);
  void set_scores(std::span<const double> scores);
  void set_weights(std::span<const double> weights);

  std::vector<double> progress_vector() const;
  std::vector<double> invariance_vector() const;  // throws if any sample unscored
  std::vector<double> scores_vector() const;
  const std::vector<double>& weights() const noexcept { return weights_; }

  // Boundary-state serialization support. Mid-epoch accumulators are never
  // part of a snapshot; restoring resumes at an epoch boundary.
  struct Snapshot {
    std::vector<double> previous_loss;
    std::vector<double> loss_change;
    std::vector<double> progress;
    std::vector<std::optional<double>> invariance;
    std::vector<double> score;
    std::vector<double> weight;
    int finalized_epochs = 0;
  };
  Snapshot snapshot() const;
  static SampleLedger restore(const Snapshot& snapshot);

 private:
  struct Cell {
    double previous_loss = 0.0;
    double sum = 0.0;
    long count = 0;
    double loss_change = 0.0;
    double progress = 0.0;
    std::optional<double> invariance;
    double score = 0.0;
  };

  const Cell& cell_at(std::size_t sample) const;
  Cell& cell_at(std::size_t sample);

  std::vector<Cell> cells_;
  std::vector<double> weights_;
  int finalized_epochs_ = 0;
  bool recorded_since_finalize_ = false;
};

}  // namespace ddsc
