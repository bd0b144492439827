#include "ddsc/bench/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "ddsc/bench/accuracy.hpp"
#include "ddsc/checkpoint.hpp"
#include "ddsc/engine.hpp"
#include "ddsc/rng.hpp"

namespace ddsc::bench {

namespace {

constexpr std::uint64_t kLoopStream = 0x100b;
constexpr std::uint64_t kBackboneStream = 0xbb01;

std::string checkpoint_path(const std::string& dir, std::uint64_t seed, int epoch) {
  char name[64];
  std::snprintf(name, sizeof(name), "ddsc_seed%llu_epoch%03d.json",
                static_cast<unsigned long long>(seed), epoch);
  return dir + "/" + name;
}

// Ranked uniform exposure: the first `keep` entries of `ranking` share the
// weight mass, the rest get zero.
std::vector<double> exposure_weights(const std::vector<std::size_t>& ranking,
                                     std::size_t keep) {
  std::vector<double> weights(ranking.size(), 0.0);
  const double w = 1.0 / static_cast<double>(keep);
  for (std::size_t r = 0; r < keep; ++r) weights[ranking[r]] = w;
  return weights;
}

std::size_t exposure_count(std::size_t n, int epoch, int total_epochs) {
  const double phi = exposure_fraction(epoch, total_epochs);
  if (phi >= 1.0) return n;
  const auto k = static_cast<std::size_t>(
      std::ceil(phi * static_cast<double>(n) - 1e-12));
  return std::clamp<std::size_t>(k, 1, n);
}

// Per-epoch weight source for the non-engine strategies.
class WeightPolicy {
 public:
  virtual ~WeightPolicy() = default;
  virtual std::vector<double> weights_for_epoch(int epoch, std::size_t n) = 0;
  virtual void end_of_epoch(int epoch, const std::vector<double>& epoch_losses,
                            const std::vector<UnitEmbedding>& embeddings) = 0;
};

class UniformPolicy final : public WeightPolicy {
 public:
  std::vector<double> weights_for_epoch(int, std::size_t n) override {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  void end_of_epoch(int, const std::vector<double>&,
                    const std::vector<UnitEmbedding>&) override {}
};

class StaticEntropyPolicy final : public WeightPolicy {
 public:
  StaticEntropyPolicy(std::vector<int> device_labels, int device_count,
                      const ScheduleConfig& schedule)
      : device_labels_(std::move(device_labels)),
        device_count_(std::max(device_count, 2)),
        schedule_(schedule) {}

  std::vector<double> weights_for_epoch(int epoch, std::size_t n) override {
    if (epoch == 1 || frozen_entropy_.empty()) {
      return std::vector<double>(n, 1.0 / static_cast<double>(n));  // warm-up
    }
    return static_entropy_weights(frozen_entropy_, epoch, schedule_.epochs);
  }

  void end_of_epoch(int epoch, const std::vector<double>&,
                    const std::vector<UnitEmbedding>& embeddings) override {
    if (epoch != 1) return;  // the ranking freezes after warm-up
    PrototypeBank bank =
        PrototypeBank::create(static_cast<std::size_t>(device_count_), schedule_.gamma);
    std::vector<std::vector<UnitEmbedding>> by_device(bank.device_count());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      by_device[static_cast<std::size_t>(device_labels_[i])].push_back(embeddings[i]);
    }
    update_prototypes(bank, by_device, 1);
    const std::size_t effective = bank.seen_count();
    frozen_entropy_.resize(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      frozen_entropy_[i] =
          effective >= 2
              ? normalized_entropy(device_posterior(embeddings[i], bank, schedule_.tau),
                                   effective)
              : 0.5;
    }
  }

 private:
  std::vector<int> device_labels_;
  int device_count_;
  ScheduleConfig schedule_;
  std::vector<double> frozen_entropy_;
};

class SelfPacedPolicy final : public WeightPolicy {
 public:
  explicit SelfPacedPolicy(int total_epochs) : total_epochs_(total_epochs) {}

  std::vector<double> weights_for_epoch(int epoch, std::size_t n) override {
    if (epoch == 1 || previous_losses_.empty()) {
      return std::vector<double>(n, 1.0 / static_cast<double>(n));
    }
    return self_paced_weights(previous_losses_, epoch, total_epochs_);
  }

  void end_of_epoch(int, const std::vector<double>& epoch_losses,
                    const std::vector<UnitEmbedding>&) override {
    previous_losses_ = epoch_losses;
  }

 private:
  int total_epochs_;
  std::vector<double> previous_losses_;
};

RunResult run_with_policy(Strategy strategy, WeightPolicy& policy, const Dataset& dataset,
                          const TrainOptions& options, int total_epochs,
                          std::uint64_t seed, std::uint64_t loop_seed,
                          ToyBackbone& backbone) {
  const std::size_t n = dataset.train.size();
  RunResult result;

  for (int epoch = 1; epoch <= total_epochs; ++epoch) {
    const std::vector<double> weights = policy.weights_for_epoch(epoch, n);
    const std::vector<std::size_t> order = epoch_order(loop_seed, epoch, n);

    std::vector<double> epoch_losses(n, 0.0);
    std::vector<std::vector<double>> features(n);
    double train_loss = 0.0;

    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t stop = std::min(n, start + options.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);

      std::vector<std::pair<std::size_t, double>> batch_losses;
      batch_losses.reserve(batch.size());
      for (std::size_t i : batch) {
        const double loss = backbone.per_sample_loss(i);
        epoch_losses[i] = loss;
        batch_losses.emplace_back(i, loss);
        features[i] = backbone.embed(i);
      }

      // Staged strategies zero out samples; a batch with no admitted sample
      // contributes no step.
      const double mass = batch_weight_mass(weights, batch);
      if (mass > 0.0) {
        train_loss += mass * batch_weighted_loss(weights, batch_losses);
        backbone.apply_weighted_step(renormalize_batch(weights, batch));
      }
    }

    std::vector<UnitEmbedding> units;
    units.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      units.push_back(UnitEmbedding::normalized(std::move(features[i])));
    }
    policy.end_of_epoch(epoch, epoch_losses, units);

    const SplitAccuracy acc = evaluate_on_test(backbone, dataset);
    CurveRow row;
    row.strategy = std::string(strategy_name(strategy));
    row.seed = seed;
    row.epoch = epoch;
    row.lambda = 0.0;
    row.train_loss = train_loss;
    row.acc_overall = acc.overall;
    row.acc_seen = acc.seen;
    row.acc_unseen = acc.unseen;
    row.weight_entropy = weight_stats(weights).entropy;
    result.rows.push_back(std::move(row));
    result.final_accuracy = acc;
  }
  return result;
}

RunResult run_engine(const Dataset& dataset, const ScheduleConfig& schedule,
                     const TrainOptions& options, std::uint64_t seed,
                     std::uint64_t loop_seed, ToyBackbone& backbone,
                     const std::string& checkpoint_dir) {
  std::vector<SampleMeta> meta(dataset.train.size());
  for (std::size_t i = 0; i < dataset.train.size(); ++i) {
    meta[i] = SampleMeta{dataset.train[i].device, dataset.train[i].label};
  }
  CurriculumEngine engine(schedule, std::move(meta), dataset.train_devices, loop_seed,
                          options.batch_size);
  if (!checkpoint_dir.empty()) {
    save_checkpoint(engine.state(), checkpoint_path(checkpoint_dir, seed, 0));
  }

  RunResult result;
  for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
    const EpochReport report = engine.run_epoch(backbone);
    const SplitAccuracy acc = evaluate_on_test(backbone, dataset);
    CurveRow row;
    row.strategy = std::string(strategy_name(Strategy::Ddsc));
    row.seed = seed;
    row.epoch = epoch;
    row.lambda = report.lambda;
    row.train_loss = report.weighted_loss;
    row.acc_overall = acc.overall;
    row.acc_seen = acc.seen;
    row.acc_unseen = acc.unseen;
    row.weight_entropy = report.stats.entropy;
    result.rows.push_back(std::move(row));
    result.final_accuracy = acc;
    if (!checkpoint_dir.empty()) {
      save_checkpoint(engine.state(), checkpoint_path(checkpoint_dir, seed, epoch));
    }
  }
  return result;
}

}  // namespace

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "ddsc") return Strategy::Ddsc;
  if (name == "uniform") return Strategy::Uniform;
  if (name == "static_entropy") return Strategy::StaticEntropy;
  if (name == "self_paced") return Strategy::SelfPaced;
  return std::nullopt;
}

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Ddsc: return "ddsc";
    case Strategy::Uniform: return "uniform";
    case Strategy::StaticEntropy: return "static_entropy";
    case Strategy::SelfPaced: return "self_paced";
  }
  throw std::logic_error("unknown strategy");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all{Strategy::Ddsc, Strategy::Uniform,
                                         Strategy::StaticEntropy, Strategy::SelfPaced};
  return all;
}

double exposure_fraction(int epoch, int total_epochs) {
  if (total_epochs < 1) throw std::invalid_argument("total_epochs must be at least 1");
  if (epoch < 1 || epoch > total_epochs) throw std::out_of_range("epoch outside 1..T");
  if (epoch == total_epochs) return 1.0;
  return 0.3 + 0.7 * static_cast<double>(epoch - 1) / static_cast<double>(total_epochs - 1);
}

std::vector<double> static_entropy_weights(const std::vector<double>& frozen_entropy,
                                           int epoch, int total_epochs) {
  const std::size_t n = frozen_entropy.size();
  if (n == 0) throw std::invalid_argument("empty entropy ranking");
  std::vector<std::size_t> ranking(n);
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  // high entropy (domain-invariant) first; index ascending on ties
  std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
    return frozen_entropy[a] > frozen_entropy[b];
  });
  return exposure_weights(ranking, exposure_count(n, epoch, total_epochs));
}

std::vector<double> self_paced_weights(const std::vector<double>& previous_losses,
                                       int epoch, int total_epochs) {
  const std::size_t n = previous_losses.size();
  if (n == 0) throw std::invalid_argument("empty loss vector");
  std::vector<std::size_t> ranking(n);
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  // lowest previous loss (easiest) first; index ascending on ties
  std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
    return previous_losses[a] < previous_losses[b];
  });
  return exposure_weights(ranking, exposure_count(n, epoch, total_epochs));
}

SplitAccuracy evaluate_on_test(const ToyBackbone& backbone, const Dataset& dataset) {
  std::vector<int> pred;
  std::vector<int> truth;
  std::vector<int> pred_seen, truth_seen, pred_unseen, truth_unseen;
  pred.reserve(dataset.test.size());
  truth.reserve(dataset.test.size());
  for (const Sample& s : dataset.test) {
    const int p = backbone.predict(s.x);
    pred.push_back(p);
    truth.push_back(s.label);
    if (s.device < dataset.train_devices) {
      pred_seen.push_back(p);
      truth_seen.push_back(s.label);
    } else {
      pred_unseen.push_back(p);
      truth_unseen.push_back(s.label);
    }
  }
  SplitAccuracy acc;
  acc.overall = classwise_accuracy(pred, truth, dataset.classes);
  acc.seen = classwise_accuracy(pred_seen, truth_seen, dataset.classes);
  acc.unseen = classwise_accuracy(pred_unseen, truth_unseen, dataset.classes);
  return acc;
}

RunResult run_strategy(Strategy strategy, const Dataset& dataset,
                       const ScheduleConfig& schedule, const TrainOptions& options,
                       std::uint64_t seed, const std::string& checkpoint_dir) {
  if (dataset.train.empty()) throw std::invalid_argument("empty training split");
  if (options.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  schedule.validate();

  const std::uint64_t loop_seed = rng::mix(seed, kLoopStream);
  BackboneConfig backbone_config;
  backbone_config.raw_dim = dataset.raw_dim;
  backbone_config.embed_dim = options.embed_dim;
  backbone_config.classes = dataset.classes;
  backbone_config.learning_rate = options.learning_rate;
  backbone_config.init_seed = rng::mix(seed, kBackboneStream);
  ToyBackbone backbone(backbone_config, dataset.train);

  switch (strategy) {
    case Strategy::Ddsc:
      return run_engine(dataset, schedule, options, seed, loop_seed, backbone,
                        checkpoint_dir);
    case Strategy::Uniform: {
      UniformPolicy policy;
      return run_with_policy(strategy, policy, dataset, options, schedule.epochs, seed,
                             loop_seed, backbone);
    }
    case Strategy::StaticEntropy: {
      std::vector<int> devices(dataset.train.size());
      for (std::size_t i = 0; i < dataset.train.size(); ++i) {
        devices[i] = dataset.train[i].device;
      }
      StaticEntropyPolicy policy(std::move(devices), dataset.train_devices, schedule);
      return run_with_policy(strategy, policy, dataset, options, schedule.epochs, seed,
                             loop_seed, backbone);
    }
    case Strategy::SelfPaced: {
      SelfPacedPolicy policy(schedule.epochs);
      return run_with_policy(strategy, policy, dataset, options, schedule.epochs, seed,
                             loop_seed, backbone);
    }
  }
  throw std::logic_error("unknown strategy");
}

}  // namespace ddsc::bench
