#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ddsc {

// Hyperparameters of the curriculum schedule. Everything here is
// configurable; the defaults are the values the engine ships with.
struct ScheduleConfig {
  int epochs = 40;           // T
  double lambda_min = 0.2;   // floor of the cosine mixing schedule
  double tau = 0.1;          // device-posterior temperature
  double beta = 0.9;         // loss-change EMA rate
  double gamma = 0.3;        // prototype EMA rate
  double eta_h = 0.7;        // invariance EMA rate
  double epsilon = 1e-12;    // min-max normalization guard

  // Engine-level sanity. lambda_min = 1 is allowed here (it pins the mix to
  // the invariance signal, useful for ablations); user-facing config
  // validation is stricter and lives in the cli layer.
  void validate() const;
};

// Cosine-decayed mixing coefficient with a floor: evaluates the schedule at
// progress epoch/total_epochs. Monotone non-increasing in epoch; equals
// lambda_min exactly at epoch == total_epochs.
double lambda_at(int epoch, int total_epochs, double lambda_min);

// s_i = lambda * invariance_i + (1 - lambda) * progress_i.
std::vector<double> fuse_scores(std::span<const double> invariance,
                                std::span<const double> progress,
                                double lambda);

// Max-subtracted softmax onto the probability simplex. Preserves score
// ordering; adding a constant to every score leaves the output unchanged.
std::vector<double> scores_to_weights(std::span<const double> scores);

// Sum of per-sample global weights over a batch.
double batch_weight_mass(std::span<const double> global_weights,
                         std::span<const std::size_t> batch);

// Batch indices paired with their within-batch renormalized weights.
// Throws on zero mass; callers that allow all-zero batches must check
// batch_weight_mass first.
std::vector<std::pair<std::size_t, double>> renormalize_batch(
    std::span<const double> global_weights, std::span<const std::size_t> batch);

// Weighted batch loss with within-batch renormalization of the global
// weights. Over the full dataset this reduces to the plain weighted sum; on
// a batch it keeps gradient magnitudes comparable to an unweighted mean.
double batch_weighted_loss(std::span<const double> global_weights,
                           std::span<const std::pair<std::size_t, double>> batch_losses);

}  // namespace ddsc
