#include "ddsc/progress.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ddsc {

SampleLedger::SampleLedger(std::size_t sample_count)
    : cells_(sample_count),
      weights_(sample_count,
               sample_count > 0 ? 1.0 / static_cast<double>(sample_count) : 0.0) {}

const SampleLedger::Cell& SampleLedger::cell_at(std::size_t sample) const {
  if (sample >= cells_.size()) {
    throw std::out_of_range("sample index " + std::to_string(sample) + " out of range");
  }
  return cells_[sample];
}

SampleLedger::Cell& SampleLedger::cell_at(std::size_t sample) {
  return const_cast<Cell&>(static_cast<const SampleLedger*>(this)->cell_at(sample));
}

void SampleLedger::record_loss(std::size_t sample, double loss) {
  Cell& cell = cell_at(sample);
  if (!std::isfinite(loss)) {
    throw std::runtime_error("non-finite loss for sample " + std::to_string(sample));
  }
  if (loss < 0.0) {
    throw std::invalid_argument("negative loss for sample " + std::to_string(sample));
  }
  cell.sum += loss;
  cell.count += 1;
  recorded_since_finalize_ = true;
}

void SampleLedger::finalize_epoch_losses(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("loss-change EMA rate must be in (0, 1)");
  }
  if (finalized_epochs_ > 0 && !recorded_since_finalize_) {
    throw std::runtime_error("double finalize");
  }
  for (Cell& cell : cells_) {
    const double epoch_loss =
        cell.count > 0 ? cell.sum / static_cast<double>(cell.count) : cell.previous_loss;
    // The first epoch has no predecessor to diff against; unvisited samples
    // have no observable change either.
    const double change = (finalized_epochs_ == 0 || cell.count == 0)
                              ? 0.0
                              : std::abs(epoch_loss - cell.previous_loss);
    cell.loss_change = beta * cell.loss_change + (1.0 - beta) * change;
    cell.previous_loss = epoch_loss;
    cell.sum = 0.0;
    cell.count = 0;
  }
  ++finalized_epochs_;
  recorded_since_finalize_ = false;
}

void SampleLedger::normalize_progress(double epsilon) {
  if (cells_.empty()) throw std::runtime_error("empty ledger");
  if (!(epsilon > 0.0)) throw std::invalid_argument("normalization epsilon must be positive");
  if (finalized_epochs_ == 0) {
    throw std::runtime_error("normalize_progress requires a finalized epoch");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Cell& cell : cells_) {
    lo = std::min(lo, cell.loss_change);
    hi = std::max(hi, cell.loss_change);
  }
  const double denom = hi - lo + epsilon;
  for (Cell& cell : cells_) {
    cell.progress = (cell.loss_change - lo) / denom;
  }
}

double SampleLedger::previous_loss(std::size_t sample) const { return cell_at(sample).previous_loss; }
double SampleLedger::loss_change(std::size_t sample) const { return cell_at(sample).loss_change; }
double SampleLedger::progress(std::size_t sample) const { return cell_at(sample).progress; }
std::optional<double> SampleLedger::invariance(std::size_t sample) const {
  return cell_at(sample).invariance;
}
double SampleLedger::score(std::size_t sample) const { return cell_at(sample).score; }

double SampleLedger::weight(std::size_t sample) const {
  cell_at(sample);  // range check
  return weights_[sample];
}

void SampleLedger::set_invariance(std::size_t sample, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("invariance score out of [0, 1]");
  }
  cell_at(sample).invariance = value;
}

void SampleLedger::set_scores(std::span<const double> scores) {
  if (scores.size() != cells_.size()) throw std::invalid_argument("score count mismatch");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].score = scores[i];
}

void SampleLedger::set_weights(std::span<const double> weights) {
  if (weights.size() != cells_.size()) throw std::invalid_argument("weight count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
  weights_.assign(weights.begin(), weights.end());
}

std::vector<double> SampleLedger::progress_vector() const {
  std::vector<double> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = cells_[i].progress;
  return out;
}

std::vector<double> SampleLedger::invariance_vector() const {
  std::vector<double> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i].invariance.has_value()) {
      throw std::runtime_error("sample " + std::to_string(i) + " has no invariance score yet");
    }
    out[i] = *cells_[i].invariance;
  }
  return out;
}

std::vector<double> SampleLedger::scores_vector() const {
  std::vector<double> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = cells_[i].score;
  return out;
}

SampleLedger::Snapshot SampleLedger::snapshot() const {
  Snapshot snap;
  snap.finalized_epochs = finalized_epochs_;
  const std::size_t n = cells_.size();
  snap.previous_loss.resize(n);
  snap.loss_change.resize(n);
  snap.progress.resize(n);
  snap.invariance.resize(n);
  snap.score.resize(n);
  snap.weight = weights_;
  for (std::size_t i = 0; i < n; ++i) {
    snap.previous_loss[i] = cells_[i].previous_loss;
    snap.loss_change[i] = cells_[i].loss_change;
    snap.progress[i] = cells_[i].progress;
    snap.invariance[i] = cells_[i].invariance;
    snap.score[i] = cells_[i].score;
  }
  return snap;
}

SampleLedger SampleLedger::restore(const Snapshot& snapshot) {
  const std::size_t n = snapshot.previous_loss.size();
  if (snapshot.loss_change.size() != n || snapshot.progress.size() != n ||
      snapshot.invariance.size() != n || snapshot.score.size() != n ||
      snapshot.weight.size() != n) {
    throw std::invalid_argument("ledger snapshot arrays disagree on sample count");
  }
  if (snapshot.finalized_epochs < 0) {
    throw std::invalid_argument("ledger snapshot has negative epoch count");
  }
  SampleLedger ledger(n);
  for (std::size_t i = 0; i < n; ++i) {
    Cell& cell = ledger.cells_[i];
    cell.previous_loss = snapshot.previous_loss[i];
    cell.loss_change = snapshot.loss_change[i];
    cell.progress = snapshot.progress[i];
    cell.invariance = snapshot.invariance[i];
    cell.score = snapshot.score[i];
  }
  if (n > 0) ledger.set_weights(snapshot.weight);
  ledger.finalized_epochs_ = snapshot.finalized_epochs;
  return ledger;
}

}  // namespace ddsc
