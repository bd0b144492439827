#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddsc/bench/synthetic.hpp"
#include "ddsc/engine.hpp"

namespace ddsc::bench {

struct BackboneConfig {
  int raw_dim = 32;
  int embed_dim = 16;
  int classes = 5;
  double learning_rate = 0.3;
  std::uint64_t init_seed = 0;
};

// Two-layer tanh classifier trained by SGD on the weighted cross-entropy.
// The post-tanh hidden layer is the embedding tap the curriculum consumes.
// Parameters live in one flat vector, laid out W1 | b1 | W2 | b2, which keeps
// finite-difference checks trivial.
class ToyBackbone final : public Trainer {
 public:
  ToyBackbone(BackboneConfig config, std::vector<Sample> train);

  // Trainer contract. embed() and per_sample_loss() are pure.
  std::vector<double> embed(std::size_t sample) override;
  double per_sample_loss(std::size_t sample) override;
  void apply_weighted_step(std::span<const std::pair<std::size_t, double>> batch) override;

  int predict(const std::vector<double>& x) const;  // argmax logits, lowest index wins ties

  // Objective and its analytic gradient for a weighted batch; exposed so
  // tests can difference the objective against the gradient.
  double weighted_loss(std::span<const std::pair<std::size_t, double>> batch) const;
  std::vector<double> weighted_gradient(
      std::span<const std::pair<std::size_t, double>> batch) const;

  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  std::size_t train_size() const noexcept { return train_.size(); }
  const BackboneConfig& config() const noexcept { return config_; }

 private:
  struct Forward {
    std::vector<double> hidden;
    std::vector<double> logits;
    double loss = 0.0;
  };
  Forward forward(const std::vector<double>& x, int label) const;
  std::vector<double> logits_of(const std::vector<double>& x) const;
  const Sample& sample_at(std::size_t index) const;

  // flat parameter offsets
  std::size_t w1_at(int row, int col) const;
  std::size_t b1_at(int row) const;
  std::size_t w2_at(int row, int col) const;
  std::size_t b2_at(int row) const;

  BackboneConfig config_;
  std::vector<Sample> train_;
  std::vector<double> params_;
};

}  // namespace ddsc::bench
