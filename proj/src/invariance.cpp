#include "ddsc/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ddsc {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(const std::vector<double>& values) { return std::sqrt(dot(values, values)); }

UnitEmbedding UnitEmbedding::normalized(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("embedding must have at least one dimension");
  const double norm = l2_norm(values);
  if (!std::isfinite(norm) || norm <= 0.0) {
    throw std::invalid_argument("cannot normalize embedding with zero or non-finite norm");
  }
  for (double& v : values) v /= norm;
  return UnitEmbedding(std::move(values));
}

PrototypeBank PrototypeBank::create(std::size_t device_count, double gamma) {
  if (device_count < 2) throw std::invalid_argument("prototype bank requires at least two devices");
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("prototype EMA rate must be in (0, 1]");
  }
  PrototypeBank bank;
  bank.prototypes.resize(device_count);
  bank.seen.assign(device_count, false);
  bank.gamma = gamma;
  return bank;
}

std::size_t PrototypeBank::seen_count() const noexcept {
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

DevicePosterior device_posterior(const UnitEmbedding& embedding,
                                 const PrototypeBank& bank, double tau) {
  if (!std::isfinite(tau) || !(tau > 0.0)) throw std::invalid_argument("invalid temperature");
  if (bank.seen_count() == 0) throw std::runtime_error("empty prototype bank");

  const std::size_t devices = bank.device_count();
  std::vector<double> scores(devices, 0.0);
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < devices; ++m) {
    if (!bank.seen[m]) continue;
    scores[m] = dot(embedding.values(), bank.prototypes[m]) / tau;
    max_score = std::max(max_score, scores[m]);
  }

  DevicePosterior posterior;
  posterior.temperature = tau;
  posterior.probs.assign(devices, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < devices; ++m) {
    if (!bank.seen[m]) continue;
    posterior.probs[m] = std::exp(scores[m] - max_score);
    total += posterior.probs[m];
  }
  for (std::size_t m = 0; m < devices; ++m) {
    if (bank.seen[m]) posterior.probs[m] /= total;
  }
  return posterior;
}

double normalized_entropy(const DevicePosterior& posterior,
                          std::size_t effective_devices) {
  if (effective_devices < 2) {
    throw std::invalid_argument("entropy undefined for fewer than two devices");
  }
  double entropy = 0.0;
  for (double p : posterior.probs) {
    if (p < 0.0) throw std::invalid_argument("posterior probability below zero");
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::clamp(entropy / std::log(static_cast<double>(effective_devices)), 0.0, 1.0);
}

void update_prototypes(PrototypeBank& bank,
                       const std::vector<std::vector<UnitEmbedding>>& epoch_embeddings,
                       int epoch) {
  if (epoch_embeddings.size() != bank.device_count()) {
    throw std::invalid_argument("per-device embedding lists must match bank device count");
  }
  for (std::size_t m = 0; m < bank.device_count(); ++m) {
    const auto& observed = epoch_embeddings[m];
    if (observed.empty()) continue;  // absent device keeps its previous state

    std::vector<double> mean(observed.front().dim(), 0.0);
    for (const UnitEmbedding& z : observed) {
      if (z.dim() != mean.size()) {
        throw std::invalid_argument("embedding dimension changed within an epoch");
      }
      for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += z.values()[f];
    }
    for (double& v : mean) v /= static_cast<double>(observed.size());

    std::vector<double> updated;
    if (bank.seen[m]) {
      const auto& prototype = bank.prototypes[m];
      if (prototype.size() != mean.size()) {
        throw std::invalid_argument("embedding dimension differs from stored prototype");
      }
      updated.resize(mean.size());
      for (std::size_t f = 0; f < mean.size(); ++f) {
        updated[f] = (1.0 - bank.gamma) * prototype[f] + bank.gamma * mean[f];
      }
    } else {
      updated = std::move(mean);  // first appearance: normalized epoch mean
    }

    const double norm = l2_norm(updated);
    if (!std::isfinite(norm) || !(norm > 0.0)) throw std::runtime_error("degenerate prototype mean");
    for (double& v : updated) v /= norm;
    bank.prototypes[m] = std::move(updated);
    bank.seen[m] = true;
  }
  bank.last_update_epoch = epoch;
}

double smooth_invariance(std::optional<double> previous, double value, double eta_h) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("invariance score out of [0, 1]");
  }
  if (!(eta_h > 0.0 && eta_h < 1.0)) {
    throw std::invalid_argument("invariance EMA rate must be in (0, 1)");
  }
  if (!previous.has_value()) return value;
  if (!(*previous >= 0.0 && *previous <= 1.0)) {
    throw std::invalid_argument("previous invariance out of [0, 1]");
  }
  return eta_h * *previous + (1.0 - eta_h) * value;
}

}  // namespace ddsc
