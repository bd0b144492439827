#include "ddsc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ddsc {

void ScheduleConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(lambda_min >= 0.0 && lambda_min <= 1.0)) {
    throw std::invalid_argument("lambda_min out of [0, 1]");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta out of (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma out of (0, 1]");
  if (!(eta_h > 0.0 && eta_h < 1.0)) throw std::invalid_argument("eta_h out of (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

double lambda_at(int epoch, int total_epochs, double lambda_min) {
  if (total_epochs < 1) throw std::invalid_argument("total_epochs must be at least 1");
  if (epoch < 1 || epoch > total_epochs) {
    throw std::out_of_range("epoch " + std::to_string(epoch) + " outside 1.." +
                            std::to_string(total_epochs));
  }
  if (!(lambda_min >= 0.0 && lambda_min <= 1.0)) {
    throw std::invalid_argument("lambda_min out of [0, 1]");
  }
  const double progress = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lambda_min +
         (1.0 - lambda_min) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::vector<double> fuse_scores(std::span<const double> invariance,
                                std::span<const double> progress,
                                double lambda) {
  if (invariance.empty() || invariance.size() != progress.size()) {
    throw std::invalid_argument("signal vector length mismatch");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda out of [0, 1]");
  std::vector<double> scores(invariance.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = lambda * invariance[i] + (1.0 - lambda) * progress[i];
  }
  return scores;
}

std::vector<double> scores_to_weights(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("empty score vector");
  double max_score = scores[0];
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
    max_score = std::max(max_score, s);
  }
  std::vector<double> weights(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp(scores[i] - max_score);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

double batch_weight_mass(std::span<const double> global_weights,
                         std::span<const std::size_t> batch) {
  double mass = 0.0;
  for (std::size_t index : batch) {
    if (index >= global_weights.size()) {
      throw std::out_of_range("batch sample index out of range");
    }
    mass += global_weights[index];
  }
  return mass;
}

std::vector<std::pair<std::size_t, double>> renormalize_batch(
    std::span<const double> global_weights, std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double mass = batch_weight_mass(global_weights, batch);
  if (!(mass > 0.0)) throw std::runtime_error("zero batch weight mass");
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(batch.size());
  for (std::size_t index : batch) {
    out.emplace_back(index, global_weights[index] / mass);
  }
  return out;
}

double batch_weighted_loss(std::span<const double> global_weights,
                           std::span<const std::pair<std::size_t, double>> batch_losses) {
  if (batch_losses.empty()) throw std::invalid_argument("empty batch");
  double mass = 0.0;
  for (const auto& [index, loss] : batch_losses) {
    (void)loss;
    if (index >= global_weights.size()) {
      throw std::out_of_range("batch sample index out of range");
    }
    mass += global_weights[index];
  }
  if (!(mass > 0.0)) throw std::runtime_error("zero batch weight mass");
  double value = 0.0;
  for (const auto& [index, loss] : batch_losses) {
    value += (global_weights[index] / mass) * loss;
  }
  return value;
}

}  // namespace ddsc
