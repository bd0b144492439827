#include "ddsc/bench/accuracy.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ddsc::bench {

double classwise_accuracy(std::span<const int> predicted, std::span<const int> truth,
                          int classes) {
  if (classes < 1) throw std::invalid_argument("classes must be at least 1");
  if (truth.empty() || predicted.size() != truth.size()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  std::vector<long> total(static_cast<std::size_t>(classes), 0);
  std::vector<long> correct(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes) {
      throw std::invalid_argument("truth label out of range");
    }
    if (predicted[i] < 0 || predicted[i] >= classes) {
      throw std::invalid_argument("predicted label out of range");
    }
    total[static_cast<std::size_t>(truth[i])] += 1;
    if (predicted[i] == truth[i]) correct[static_cast<std::size_t>(truth[i])] += 1;
  }
  double sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    if (total[static_cast<std::size_t>(c)] == 0) {
      throw std::runtime_error("undefined per-class accuracy: class " + std::to_string(c) +
                               " absent from truth");
    }
    sum += static_cast<double>(correct[static_cast<std::size_t>(c)]) /
           static_cast<double>(total[static_cast<std::size_t>(c)]);
  }
  return sum / static_cast<double>(classes);
}

}  // namespace ddsc::bench
