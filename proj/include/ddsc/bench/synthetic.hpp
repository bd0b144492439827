#pragma once

#include <cstdint>
#include <vector>

namespace ddsc::bench {

// Parameters of the synthetic multi-device classification benchmark. Each
// device applies its own random affine "coloring" to class-conditional
// Gaussian draws; unseen devices appear only in the test split.
struct SyntheticSpec {
  int classes = 5;
  int train_devices = 3;
  int unseen_devices = 2;
  int raw_dim = 32;
  int per_cell = 60;  // samples generated per (class, device) cell
  double shift_strength = 0.6;
  double noise_sigma = 0.5;
  double label_fraction = 1.0;  // training label budget, per cell
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sample {
  std::vector<double> x;
  int label = 0;
  int device = 0;
};

struct Dataset {
  std::vector<Sample> train;  // training devices only, subsampled per cell
  std::vector<Sample> test;   // all devices, full cells
  int classes = 0;
  int train_devices = 0;
  int total_devices = 0;
  int raw_dim = 0;
};

// Deterministic in spec.seed. The per-cell pool is drawn in full and the
// label budget keeps its prefix, so the test split and the retained training
// samples are identical across label fractions of the same seed.
Dataset generate_dataset(const SyntheticSpec& spec);

// Per-feature standardization fitted on the training split and applied to
// both splits.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const std::vector<Sample>& train);
  void apply(std::vector<Sample>& samples) const;
  void apply(Dataset& dataset) const;
};

}  // namespace ddsc::bench
