#include "ddsc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ddsc/rng.hpp"

namespace ddsc {

namespace {

constexpr std::uint64_t kOrderStream = 0x0e0c;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

WeightStats weight_stats(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("empty weight vector");
  WeightStats stats;
  std::vector<double> sorted(weights.begin(), weights.end());
  std::sort(sorted.begin(), sorted.end());
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.q25 = quantile_sorted(sorted, 0.25);
  stats.median = quantile_sorted(sorted, 0.5);
  stats.q75 = quantile_sorted(sorted, 0.75);
  if (weights.size() == 1) {
    stats.entropy = 1.0;
  } else {
    double h = 0.0;
    for (double w : weights) {
      if (w > 0.0) h -= w * std::log(w);
    }
    stats.entropy = h / std::log(static_cast<double>(weights.size()));
  }
  return stats;
}

std::vector<std::size_t> epoch_order(std::uint64_t seed, int epoch, std::size_t count) {
  if (epoch < 1) throw std::invalid_argument("epoch must be at least 1");
  if (count == 0) throw std::invalid_argument("empty dataset");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 g(rng::mix(rng::mix(seed, kOrderStream), static_cast<std::uint64_t>(epoch)));
  rng::shuffle(order, g);
  return order;
}

CurriculumEngine::CurriculumEngine(ScheduleConfig config, std::vector<SampleMeta> samples,
                                   int device_count, std::uint64_t seed,
                                   std::size_t batch_size) {
  config.validate();
  if (samples.empty()) throw std::invalid_argument("empty dataset");
  if (device_count < 1) throw std::invalid_argument("device count must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].device < 0 || samples[i].device >= device_count) {
      throw std::invalid_argument("device label out of range for sample " + std::to_string(i));
    }
    if (samples[i].label < 0) {
      throw std::invalid_argument("negative class label for sample " + std::to_string(i));
    }
  }
  state_.epoch = 0;
  state_.seed = seed;
  state_.batch_size = batch_size;
  state_.config = config;
  state_.samples = std::move(samples);
  // The bank always holds at least two slots; a single-device run simply
  // never sees the second one and falls back to the constant score below.
  state_.bank = PrototypeBank::create(
      std::max<std::size_t>(static_cast<std::size_t>(device_count), 2), config.gamma);
  state_.ledger = SampleLedger(state_.samples.size());
  state_.next_lambda = lambda_at(1, config.epochs, config.lambda_min);
}

CurriculumEngine::CurriculumEngine(CurriculumState state) : state_(std::move(state)) {
  state_.config.validate();
  if (state_.samples.empty()) throw std::invalid_argument("empty dataset in state");
  if (state_.ledger.size() != state_.samples.size()) {
    throw std::invalid_argument("ledger size disagrees with sample count");
  }
  if (state_.bank.device_count() < 2) {
    throw std::invalid_argument("prototype bank in state has fewer than two slots");
  }
  if (state_.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (state_.epoch < 0 || state_.epoch > state_.config.epochs) {
    throw std::invalid_argument("state epoch outside 0..epochs");
  }
  for (std::size_t i = 0; i < state_.samples.size(); ++i) {
    const int device = state_.samples[i].device;
    if (device < 0 || static_cast<std::size_t>(device) >= state_.bank.device_count()) {
      throw std::invalid_argument("device label out of range for sample " + std::to_string(i));
    }
  }
}

EpochReport CurriculumEngine::run_epoch(Trainer& trainer) {
  const ScheduleConfig& cfg = state_.config;
  const int epoch = state_.epoch + 1;
  if (epoch > cfg.epochs) throw std::runtime_error("training already complete");
  const std::size_t n = state_.samples.size();

  std::vector<double> weights =
      (epoch == 1) ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                   : state_.ledger.weights();

  const std::vector<std::size_t> order = epoch_order(state_.seed, epoch, n);
  std::vector<std::vector<double>> features(n);
  double weighted_loss = 0.0;

  for (std::size_t start = 0; start < n; start += state_.batch_size) {
    const std::size_t stop = std::min(n, start + state_.batch_size);
    const std::span<const std::size_t> batch(order.data() + start, stop - start);

    std::vector<std::pair<std::size_t, double>> batch_losses;
    batch_losses.reserve(batch.size());
    for (std::size_t i : batch) {
      const double loss = trainer.per_sample_loss(i);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("trainer returned non-finite loss for sample " +
                                 std::to_string(i));
      }
      state_.ledger.record_loss(i, loss);
      batch_losses.emplace_back(i, loss);
      features[i] = trainer.embed(i);
    }

    const double mass = batch_weight_mass(weights, batch);
    weighted_loss += mass * batch_weighted_loss(weights, batch_losses);
    trainer.apply_weighted_step(renormalize_batch(weights, batch));
  }

  // --- end-of-epoch update block (runs exclusively) ---

  state_.ledger.finalize_epoch_losses(cfg.beta);

  std::vector<UnitEmbedding> units;
  units.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].empty()) {
      throw std::runtime_error("trainer returned empty embedding for sample " +
                               std::to_string(i));
    }
    units.push_back(UnitEmbedding::normalized(std::move(features[i])));
  }

  std::vector<std::vector<UnitEmbedding>> by_device(state_.bank.device_count());
  for (std::size_t i = 0; i < n; ++i) {
    by_device[static_cast<std::size_t>(state_.samples[i].device)].push_back(units[i]);
  }
  update_prototypes(state_.bank, by_device, epoch);

  const std::size_t effective = state_.bank.seen_count();
  if (effective < 2 && !warned_degenerate_devices_) {
    std::cerr << "ddsc: warning: fewer than two devices seen; the invariance "
                 "signal is uninformative (constant 0.5) and weighting follows "
                 "the progress signal only\n";
    warned_degenerate_devices_ = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double raw =
        effective >= 2
            ? normalized_entropy(device_posterior(units[i], state_.bank, cfg.tau), effective)
            : 0.5;
    state_.ledger.set_invariance(i, smooth_invariance(state_.ledger.invariance(i), raw,
                                                      cfg.eta_h));
  }

  state_.ledger.normalize_progress(cfg.epsilon);

  // Next-epoch weights; past the final epoch the schedule is pinned at its
  // floor so the checkpointed state stays well-defined.
  const int next_epoch = std::min(epoch + 1, cfg.epochs);
  const double lambda_next = lambda_at(next_epoch, cfg.epochs, cfg.lambda_min);
  const std::vector<double> scores = fuse_scores(state_.ledger.invariance_vector(),
                                                 state_.ledger.progress_vector(), lambda_next);
  state_.ledger.set_scores(scores);
  state_.ledger.set_weights(scores_to_weights(scores));
  state_.next_lambda = lambda_next;
  state_.epoch = epoch;

  EpochReport report;
  report.epoch = epoch;
  report.lambda = lambda_at(epoch, cfg.epochs, cfg.lambda_min);
  report.weighted_loss = weighted_loss;
  report.stats = weight_stats(weights);
  report.weights = std::move(weights);
  return report;
}

std::vector<EpochReport> CurriculumEngine::run_training(Trainer& trainer) {
  std::vector<EpochReport> reports;
  reports.reserve(static_cast<std::size_t>(state_.config.epochs - state_.epoch));
  while (state_.epoch < state_.config.epochs) {
    const int epoch = state_.epoch + 1;
    try {
      reports.push_back(run_epoch(trainer));
    } catch (const std::exception& e) {
      throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  return reports;
}

}  // namespace ddsc
