#pragma once

#include <span>

namespace ddsc::bench {

// Mean of per-class accuracies over classes 0..classes-1. Every class must
// appear in truth, otherwise its per-class accuracy is undefined and this
// throws.
double classwise_accuracy(std::span<const int> predicted, std::span<const int> truth,
                          int classes);

}  // namespace ddsc::bench
