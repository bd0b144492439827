#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ddsc {

double dot(const std::vector<double>& a, const std::vector<double>& b);
double l2_norm(const std::vector<double>& values);

// Feature vector of unit Euclidean norm. The only way to build one is
// through normalized(), so holders never carry a zero or unnormalized
// vector.
class UnitEmbedding {
 public:
  static UnitEmbedding normalized(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }

 private:
  explicit UnitEmbedding(std::vector<double> values) : values_(std::move(values)) {}

  std::vector<double> values_;
};

// One unit prototype per recording device, refreshed once per epoch from
// detached embeddings. seen[m] flips false -> true the first epoch device m
// contributes embeddings and never flips back; prototypes of unseen devices
// are empty placeholders.
struct PrototypeBank {
  std::vector<std::vector<double>> prototypes;
  std::vector<bool> seen;
  double gamma = 0.3;  // EMA rate in (0, 1]
  int last_update_epoch = 0;

  static PrototypeBank create(std::size_t device_count, double gamma);

  std::size_t device_count() const noexcept { return prototypes.size(); }
  std::size_t seen_count() const noexcept;
};

// Temperature-scaled posterior over devices. Entries for unseen devices are
// exactly zero and excluded from the normalizing sum.
struct DevicePosterior {
  std::vector<double> probs;
  double temperature = 0.0;
};

// Softmax over cosine scores against the seen prototypes. The maximum score
// is subtracted before exponentiation so small temperatures cannot overflow.
DevicePosterior device_posterior(const UnitEmbedding& embedding,
                                 const PrototypeBank& bank, double tau);

// Shannon entropy of the posterior divided by log(effective_devices),
// clamped to [0, 1]. Zero-probability entries contribute nothing.
double normalized_entropy(const DevicePosterior& posterior,
                          std::size_t effective_devices);

// End-of-epoch prototype refresh. epoch_embeddings is indexed by device; an
// empty list leaves that device untouched. A device appearing for the first
// time is initialized to its normalized epoch mean, otherwise the mean is
// blended in by EMA and the result re-normalized.
void update_prototypes(PrototypeBank& bank,
                       const std::vector<std::vector<UnitEmbedding>>& epoch_embeddings,
                       int epoch);

// EMA of the normalized entropy. A sample's first scored epoch passes the
// raw value through.
double smooth_invariance(std::optional<double> previous, double value,
                         double eta_h);

}  // namespace ddsc
