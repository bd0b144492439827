#include "ddsc/bench/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ddsc/rng.hpp"

namespace ddsc::bench {

namespace {

constexpr std::uint64_t kDatasetStream = 0xda7a;

struct DeviceTransform {
  std::vector<double> matrix;  // raw_dim x raw_dim, row major
  std::vector<double> bias;
};

}  // namespace

void SyntheticSpec::validate() const {
  if (classes < 2) throw std::invalid_argument("classes must be at least 2");
  if (train_devices < 2) throw std::invalid_argument("train_devices must be at least 2");
  if (unseen_devices < 1) throw std::invalid_argument("unseen_devices must be at least 1");
  if (raw_dim < 1) throw std::invalid_argument("raw_dim must be at least 1");
  if (per_cell < 1) throw std::invalid_argument("per_cell must be at least 1");
  if (!(shift_strength >= 0.0)) throw std::invalid_argument("shift_strength must be non-negative");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
  if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
    throw std::invalid_argument("label_fraction out of (0, 1]");
  }
}

Dataset generate_dataset(const SyntheticSpec& spec) {
  spec.validate();
  const int devices = spec.train_devices + spec.unseen_devices;
  const int dim = spec.raw_dim;
  std::mt19937_64 g(rng::mix(spec.seed, kDatasetStream));

  std::vector<std::vector<double>> centroids(static_cast<std::size_t>(spec.classes));
  for (auto& c : centroids) {
    c.resize(static_cast<std::size_t>(dim));
    for (double& v : c) v = rng::normal(g);
  }

  // A_m = I + shift * R_m with unit-scale random entries, plus a bias of the
  // same scale; shift = 0 collapses every device to the identity.
  std::vector<DeviceTransform> transforms(static_cast<std::size_t>(devices));
  for (auto& t : transforms) {
    t.matrix.resize(static_cast<std::size_t>(dim) * dim);
    t.bias.resize(static_cast<std::size_t>(dim));
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const double identity = (r == c) ? 1.0 : 0.0;
        t.matrix[static_cast<std::size_t>(r) * dim + c] =
            identity + spec.shift_strength * rng::normal(g);
      }
    }
    for (double& b : t.bias) b = spec.shift_strength * rng::normal(g);
  }

  auto draw_sample = [&](int label, int device) {
    const auto& t = transforms[static_cast<std::size_t>(device)];
    std::vector<double> clean(static_cast<std::size_t>(dim));
    for (int f = 0; f < dim; ++f) {
      clean[static_cast<std::size_t>(f)] =
          centroids[static_cast<std::size_t>(label)][static_cast<std::size_t>(f)] +
          spec.noise_sigma * rng::normal(g);
    }
    Sample s;
    s.label = label;
    s.device = device;
    s.x.resize(static_cast<std::size_t>(dim));
    for (int r = 0; r < dim; ++r) {
      double acc = t.bias[static_cast<std::size_t>(r)];
      const double* row = t.matrix.data() + static_cast<std::size_t>(r) * dim;
      for (int c = 0; c < dim; ++c) acc += row[c] * clean[static_cast<std::size_t>(c)];
      s.x[static_cast<std::size_t>(r)] = acc;
    }
    return s;
  };

  const long keep = std::lround(spec.label_fraction * static_cast<double>(spec.per_cell));
  if (keep < 1) {
    throw std::runtime_error(
        "label fraction leaves empty (class, device) cells; increase per_cell");
  }

  Dataset ds;
  ds.classes = spec.classes;
  ds.train_devices = spec.train_devices;
  ds.total_devices = devices;
  ds.raw_dim = dim;

  for (int device = 0; device < spec.train_devices; ++device) {
    for (int label = 0; label < spec.classes; ++label) {
      for (int k = 0; k < spec.per_cell; ++k) {
        Sample s = draw_sample(label, device);
        if (k < keep) ds.train.push_back(std::move(s));
      }
    }
  }
  for (int device = 0; device < devices; ++device) {
    for (int label = 0; label < spec.classes; ++label) {
      for (int k = 0; k < spec.per_cell; ++k) {
        ds.test.push_back(draw_sample(label, device));
      }
    }
  }
  return ds;
}

Standardizer Standardizer::fit(const std::vector<Sample>& train) {
  if (train.empty()) throw std::invalid_argument("cannot fit standardizer on empty split");
  const std::size_t dim = train.front().x.size();
  Standardizer st;
  st.mean.assign(dim, 0.0);
  st.scale.assign(dim, 0.0);
  for (const Sample& s : train) {
    if (s.x.size() != dim) throw std::invalid_argument("inconsistent feature dimension");
    for (std::size_t f = 0; f < dim; ++f) st.mean[f] += s.x[f];
  }
  for (double& m : st.mean) m /= static_cast<double>(train.size());
  for (const Sample& s : train) {
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = s.x[f] - st.mean[f];
      st.scale[f] += d * d;
    }
  }
  for (double& v : st.scale) {
    v = 1.0 / std::sqrt(v / static_cast<double>(train.size()) + 1e-12);
  }
  return st;
}

void Standardizer::apply(std::vector<Sample>& samples) const {
  for (Sample& s : samples) {
    if (s.x.size() != mean.size()) throw std::invalid_argument("inconsistent feature dimension");
    for (std::size_t f = 0; f < mean.size(); ++f) {
      s.x[f] = (s.x[f] - mean[f]) * scale[f];
    }
  }
}

void Standardizer::apply(Dataset& dataset) const {
  apply(dataset.train);
  apply(dataset.test);
}

}  // namespace ddsc::bench
