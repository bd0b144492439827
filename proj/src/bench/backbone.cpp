#include "ddsc/bench/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ddsc/rng.hpp"

namespace ddsc::bench {

namespace {
constexpr std::uint64_t kInitStream = 0x1817;
}

ToyBackbone::ToyBackbone(BackboneConfig config, std::vector<Sample> train)
    : config_(config), train_(std::move(train)) {
  if (config_.raw_dim < 1 || config_.embed_dim < 1 || config_.classes < 2) {
    throw std::invalid_argument("backbone dimensions out of range");
  }
  if (!(config_.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (train_.empty()) throw std::invalid_argument("empty training split");
  for (const Sample& s : train_) {
    if (static_cast<int>(s.x.size()) != config_.raw_dim) {
      throw std::invalid_argument("sample dimension disagrees with raw_dim");
    }
    if (s.label < 0 || s.label >= config_.classes) {
      throw std::invalid_argument("sample label out of range");
    }
  }

  const std::size_t count =
      static_cast<std::size_t>(config_.embed_dim) * config_.raw_dim + config_.embed_dim +
      static_cast<std::size_t>(config_.classes) * config_.embed_dim + config_.classes;
  params_.assign(count, 0.0);

  std::mt19937_64 g(rng::mix(config_.init_seed, kInitStream));
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(config_.raw_dim));
  for (int r = 0; r < config_.embed_dim; ++r) {
    for (int c = 0; c < config_.raw_dim; ++c) {
      params_[w1_at(r, c)] = w1_scale * rng::normal(g);
    }
  }
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(config_.embed_dim));
  for (int r = 0; r < config_.classes; ++r) {
    for (int c = 0; c < config_.embed_dim; ++c) {
      params_[w2_at(r, c)] = w2_scale * rng::normal(g);
    }
  }
  // biases start at zero
}

std::size_t ToyBackbone::w1_at(int row, int col) const {
  return static_cast<std::size_t>(row) * config_.raw_dim + col;
}
std::size_t ToyBackbone::b1_at(int row) const {
  return static_cast<std::size_t>(config_.embed_dim) * config_.raw_dim + row;
}
std::size_t ToyBackbone::w2_at(int row, int col) const {
  return static_cast<std::size_t>(config_.embed_dim) * config_.raw_dim + config_.embed_dim +
         static_cast<std::size_t>(row) * config_.embed_dim + col;
}
std::size_t ToyBackbone::b2_at(int row) const {
  return static_cast<std::size_t>(config_.embed_dim) * config_.raw_dim + config_.embed_dim +
         static_cast<std::size_t>(config_.classes) * config_.embed_dim + row;
}

const Sample& ToyBackbone::sample_at(std::size_t index) const {
  if (index >= train_.size()) {
    throw std::out_of_range("train sample index " + std::to_string(index) + " out of range");
  }
  return train_[index];
}

std::vector<double> ToyBackbone::logits_of(const std::vector<double>& x) const {
  std::vector<double> hidden(static_cast<std::size_t>(config_.embed_dim));
  for (int h = 0; h < config_.embed_dim; ++h) {
    double acc = params_[b1_at(h)];
    for (int f = 0; f < config_.raw_dim; ++f) {
      acc += params_[w1_at(h, f)] * x[static_cast<std::size_t>(f)];
    }
    hidden[static_cast<std::size_t>(h)] = std::tanh(acc);
  }
  std::vector<double> logits(static_cast<std::size_t>(config_.classes));
  for (int c = 0; c < config_.classes; ++c) {
    double acc = params_[b2_at(c)];
    for (int h = 0; h < config_.embed_dim; ++h) {
      acc += params_[w2_at(c, h)] * hidden[static_cast<std::size_t>(h)];
    }
    logits[static_cast<std::size_t>(c)] = acc;
  }
  return logits;
}

ToyBackbone::Forward ToyBackbone::forward(const std::vector<double>& x, int label) const {
  Forward out;
  out.hidden.resize(static_cast<std::size_t>(config_.embed_dim));
  for (int h = 0; h < config_.embed_dim; ++h) {
    double acc = params_[b1_at(h)];
    for (int f = 0; f < config_.raw_dim; ++f) {
      acc += params_[w1_at(h, f)] * x[static_cast<std::size_t>(f)];
    }
    out.hidden[static_cast<std::size_t>(h)] = std::tanh(acc);
  }
  out.logits.resize(static_cast<std::size_t>(config_.classes));
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < config_.classes; ++c) {
    double acc = params_[b2_at(c)];
    for (int h = 0; h < config_.embed_dim; ++h) {
      acc += params_[w2_at(c, h)] * out.hidden[static_cast<std::size_t>(h)];
    }
    out.logits[static_cast<std::size_t>(c)] = acc;
    max_logit = std::max(max_logit, acc);
  }
  double norm = 0.0;
  for (double o : out.logits) norm += std::exp(o - max_logit);
  out.loss = max_logit + std::log(norm) - out.logits[static_cast<std::size_t>(label)];
  return out;
}

std::vector<double> ToyBackbone::embed(std::size_t sample) {
  const Sample& s = sample_at(sample);
  Forward f = forward(s.x, s.label);
  return std::move(f.hidden);
}

double ToyBackbone::per_sample_loss(std::size_t sample) {
  const Sample& s = sample_at(sample);
  return forward(s.x, s.label).loss;
}

double ToyBackbone::weighted_loss(
    std::span<const std::pair<std::size_t, double>> batch) const {
  double total = 0.0;
  for (const auto& [index, weight] : batch) {
    total += weight * forward(sample_at(index).x, sample_at(index).label).loss;
  }
  return total;
}

std::vector<double> ToyBackbone::weighted_gradient(
    std::span<const std::pair<std::size_t, double>> batch) const {
  std::vector<double> grad(params_.size(), 0.0);
  for (const auto& [index, weight] : batch) {
    const Sample& s = sample_at(index);
    const Forward f = forward(s.x, s.label);

    // softmax minus one-hot
    double max_logit = *std::max_element(f.logits.begin(), f.logits.end());
    double norm = 0.0;
    for (double o : f.logits) norm += std::exp(o - max_logit);
    std::vector<double> dlogits(f.logits.size());
    for (std::size_t c = 0; c < f.logits.size(); ++c) {
      dlogits[c] = std::exp(f.logits[c] - max_logit) / norm;
    }
    dlogits[static_cast<std::size_t>(s.label)] -= 1.0;

    std::vector<double> dhidden(static_cast<std::size_t>(config_.embed_dim), 0.0);
    for (int c = 0; c < config_.classes; ++c) {
      const double d = weight * dlogits[static_cast<std::size_t>(c)];
      grad[b2_at(c)] += d;
      for (int h = 0; h < config_.embed_dim; ++h) {
        grad[w2_at(c, h)] += d * f.hidden[static_cast<std::size_t>(h)];
        dhidden[static_cast<std::size_t>(h)] +=
            d * params_[w2_at(c, h)];
      }
    }
    for (int h = 0; h < config_.embed_dim; ++h) {
      const double u = f.hidden[static_cast<std::size_t>(h)];
      const double da = dhidden[static_cast<std::size_t>(h)] * (1.0 - u * u);
      grad[b1_at(h)] += da;
      for (int fdim = 0; fdim < config_.raw_dim; ++fdim) {
        grad[w1_at(h, fdim)] += da * s.x[static_cast<std::size_t>(fdim)];
      }
    }
  }
  return grad;
}

void ToyBackbone::apply_weighted_step(
    std::span<const std::pair<std::size_t, double>> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::vector<double> grad = weighted_gradient(batch);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    params_[k] -= config_.learning_rate * grad[k];
  }
}

int ToyBackbone::predict(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != config_.raw_dim) {
    throw std::invalid_argument("input dimension disagrees with raw_dim");
  }
  const std::vector<double> logits = logits_of(x);
  int best = 0;
  for (int c = 1; c < config_.classes; ++c) {
    if (logits[static_cast<std::size_t>(c)] > logits[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

}  // namespace ddsc::bench
