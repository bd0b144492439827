#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ddsc/engine.hpp"
#include "ddsc/rng.hpp"
#include "table_trainer.hpp"

using namespace ddsc;
using ddsc_test::TableTrainer;
using ddsc_test::Tables;

namespace {

ScheduleConfig config_for(int epochs) {
  ScheduleConfig config;
  config.epochs = epochs;
  return config;
}

}  // namespace

TEST_CASE("first epoch weights are exactly uniform") {
  std::mt19937_64 g(1);
  const Tables tables = ddsc_test::random_tables(g, 4, 3, 3, 4);
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(3), ddsc_test::meta_of(tables), 3, 7);
  const EpochReport report = engine.run_epoch(trainer);
  CHECK(report.epoch == 1);
  for (double w : report.weights) CHECK(w == 0.25);
}

TEST_CASE("a single-epoch run emits one report and stops") {
  std::mt19937_64 g(2);
  const Tables tables = ddsc_test::random_tables(g, 6, 1, 3, 4);
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(1), ddsc_test::meta_of(tables), 3, 7);
  const auto reports = engine.run_training(trainer);
  REQUIRE(reports.size() == 1);
  for (double w : reports[0].weights) CHECK(w == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(engine.run_epoch(trainer), std::runtime_error);
}

TEST_CASE("identical seeds give bit-identical training runs") {
  std::mt19937_64 g(3);
  const Tables tables = ddsc_test::random_tables(g, 10, 4, 3, 5);
  auto run = [&]() {
    TableTrainer trainer(tables);
    CurriculumEngine engine(config_for(4), ddsc_test::meta_of(tables), 3, 99);
    return engine.run_training(trainer);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].weights == b[e].weights);
    CHECK(a[e].weighted_loss == b[e].weighted_loss);
    CHECK(a[e].lambda == b[e].lambda);
  }
}

TEST_CASE("every epoch's weights form a strict simplex") {
  std::mt19937_64 g(4);
  const Tables tables = ddsc_test::random_tables(g, 12, 5, 3, 4);
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(5), ddsc_test::meta_of(tables), 3, 11);
  for (const EpochReport& report : engine.run_training(trainer)) {
    double total = 0.0;
    for (double w : report.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("lambda pinned to 1 ranks weights by the invariance signal") {
  std::mt19937_64 g(5);
  const Tables tables = ddsc_test::random_tables(g, 10, 4, 3, 5);
  ScheduleConfig config = config_for(4);
  config.lambda_min = 1.0;  // forces lambda == 1 at every epoch

  TableTrainer trainer(tables);
  CurriculumEngine engine(config, ddsc_test::meta_of(tables), 3, 13);
  std::vector<std::vector<double>> invariance_after_epoch;
  std::vector<std::vector<double>> weights_used;
  for (int e = 1; e <= 4; ++e) {
    const EpochReport report = engine.run_epoch(trainer);
    weights_used.push_back(report.weights);
    invariance_after_epoch.push_back(engine.state().ledger.invariance_vector());
  }
  for (int e = 2; e <= 4; ++e) {
    const auto weight_rank = ddsc_test::descending_ranks(weights_used[e - 1]);
    const auto signal_rank =
        ddsc_test::descending_ranks(invariance_after_epoch[e - 2]);
    CHECK(weight_rank == signal_rank);
  }
}

TEST_CASE("a frozen trainer leaves the progress signal at zero") {
  std::mt19937_64 g(6);
  Tables tables = ddsc_test::random_tables(g, 5, 3, 3, 4);
  // identical tables across epochs: loss change is identically zero
  for (int e = 1; e < 3; ++e) {
    tables.loss[static_cast<std::size_t>(e)] = tables.loss[0];
    tables.feature[static_cast<std::size_t>(e)] = tables.feature[0];
  }
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(3), ddsc_test::meta_of(tables), 3, 5);
  std::vector<EpochReport> reports;
  for (int e = 0; e < 3; ++e) reports.push_back(engine.run_epoch(trainer));

  const auto& ledger = engine.state().ledger;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(ledger.loss_change(i) == 0.0);
    CHECK(ledger.progress(i) == 0.0);
  }
  // weight order then tracks the invariance signal alone
  const auto weight_rank = ddsc_test::descending_ranks(ledger.weights());
  const auto signal_rank = ddsc_test::descending_ranks(ledger.invariance_vector());
  CHECK(weight_rank == signal_rank);
}

TEST_CASE("single-device data falls back to the constant invariance score") {
  std::mt19937_64 g(7);
  Tables tables = ddsc_test::random_tables(g, 6, 2, 1, 4);
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(2), ddsc_test::meta_of(tables), 1, 21);
  engine.run_epoch(trainer);
  const auto& state = engine.state();
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(state.ledger.invariance(i).has_value());
    CHECK(*state.ledger.invariance(i) == 0.5);
  }
  // fused score must equal lambda * 0.5 + (1 - lambda) * progress
  const double lambda = state.next_lambda;
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(state.ledger.score(i) ==
          doctest::Approx(lambda * 0.5 + (1.0 - lambda) * state.ledger.progress(i))
              .epsilon(1e-15));
  }
}

TEST_CASE("weights for epoch e ignore anything observed at epoch e") {
  std::mt19937_64 g(8);
  const int epochs = 4;
  const Tables base = ddsc_test::random_tables(g, 8, epochs, 3, 4);
  for (int corrupt_epoch = 2; corrupt_epoch <= epochs; ++corrupt_epoch) {
    Tables corrupted = base;
    for (std::size_t i = 0; i < 8; ++i) {
      corrupted.loss[static_cast<std::size_t>(corrupt_epoch - 1)][i] += 5.0;
    }

    TableTrainer trainer_a{Tables(base)};
    TableTrainer trainer_b{Tables(corrupted)};
    CurriculumEngine engine_a(config_for(epochs), ddsc_test::meta_of(base), 3, 17);
    CurriculumEngine engine_b(config_for(epochs), ddsc_test::meta_of(base), 3, 17);
    for (int e = 1; e < corrupt_epoch; ++e) {
      engine_a.run_epoch(trainer_a);
      engine_b.run_epoch(trainer_b);
    }
    const EpochReport at_corrupt_a = engine_a.run_epoch(trainer_a);
    const EpochReport at_corrupt_b = engine_b.run_epoch(trainer_b);
    CHECK(at_corrupt_a.weights == at_corrupt_b.weights);
  }
}

TEST_CASE("removing a neutral sample rescales the remaining weights uniformly") {
  // The dropped sample's embedding matches its device's other embeddings, so
  // prototypes are untouched; its smoothed change sits strictly inside the
  // min-max range, so normalization of the others is untouched too. What
  // remains is the softmax normalizer.
  const int epochs = 2;
  const std::size_t dim = 3;
  const std::size_t n_full = 5;

  Tables full;
  full.device = {0, 0, 1, 1, 0};
  full.label = {0, 1, 0, 1, 0};
  full.loss = {{1.0, 2.0, 0.5, 1.5, 1.25}, {1.4, 3.0, 0.5, 2.1, 1.45}};
  // |change|: {0.4, 1.0, 0.0, 0.6, 0.2} -> sample 4 strictly interior
  const std::vector<double> shared_a = UnitEmbedding::normalized({1.0, 2.0, 0.0}).values();
  const std::vector<double> shared_b = UnitEmbedding::normalized({0.0, 1.0, 1.0}).values();
  full.feature.assign(2, std::vector<std::vector<double>>(n_full));
  for (int e = 0; e < 2; ++e) {
    for (std::size_t i = 0; i < n_full; ++i) {
      full.feature[static_cast<std::size_t>(e)][i] = (full.device[i] == 0) ? shared_a : shared_b;
    }
  }

  Tables reduced = full;
  reduced.device.pop_back();
  reduced.label.pop_back();
  for (int e = 0; e < 2; ++e) {
    reduced.loss[static_cast<std::size_t>(e)].pop_back();
    reduced.feature[static_cast<std::size_t>(e)].pop_back();
  }

  TableTrainer trainer_full{Tables(full)};
  TableTrainer trainer_reduced{Tables(reduced)};
  CurriculumEngine engine_full(config_for(epochs), ddsc_test::meta_of(full), 2, 3);
  CurriculumEngine engine_reduced(config_for(epochs), ddsc_test::meta_of(reduced), 2, 3);
  for (int e = 0; e < epochs; ++e) {
    engine_full.run_epoch(trainer_full);
    engine_reduced.run_epoch(trainer_reduced);
  }

  const auto& w_full = engine_full.state().ledger.weights();
  const auto& w_reduced = engine_reduced.state().ledger.weights();
  const double ratio = w_reduced[0] / w_full[0];
  for (std::size_t i = 0; i < w_reduced.size(); ++i) {
    CHECK(w_reduced[i] / w_full[i] == doctest::Approx(ratio).epsilon(1e-9));
  }
}

TEST_CASE("engine validates its inputs") {
  std::mt19937_64 g(9);
  const Tables tables = ddsc_test::random_tables(g, 4, 2, 3, 4);
  CHECK_THROWS_AS(CurriculumEngine(config_for(2), {}, 3, 1), std::invalid_argument);
  auto bad_meta = ddsc_test::meta_of(tables);
  bad_meta[2].device = 7;
  CHECK_THROWS_AS(CurriculumEngine(config_for(2), bad_meta, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(CurriculumEngine(config_for(2), ddsc_test::meta_of(tables), 3, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("a non-finite trainer loss aborts naming the sample") {
  std::mt19937_64 g(10);
  Tables tables = ddsc_test::random_tables(g, 4, 1, 2, 3);
  tables.loss[0][2] = std::numeric_limits<double>::quiet_NaN();
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(1), ddsc_test::meta_of(tables), 2, 1);
  try {
    engine.run_epoch(trainer);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }
}

TEST_CASE("run_training attaches the epoch index to failures") {
  std::mt19937_64 g(11);
  Tables tables = ddsc_test::random_tables(g, 4, 3, 2, 3);
  tables.loss[1][0] = std::numeric_limits<double>::infinity();
  TableTrainer trainer(tables);
  CurriculumEngine engine(config_for(3), ddsc_test::meta_of(tables), 2, 1);
  try {
    engine.run_training(trainer);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("epoch 2") != std::string::npos);
  }
}

TEST_CASE("weight statistics describe the distribution") {
  const std::vector<double> uniform(5, 0.2);
  const WeightStats u = weight_stats(uniform);
  CHECK(u.entropy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.min == 0.2);
  CHECK(u.max == 0.2);

  const std::vector<double> skewed{0.7, 0.1, 0.1, 0.1};
  const WeightStats s = weight_stats(skewed);
  CHECK(s.entropy < 1.0);
  CHECK(s.min == 0.1);
  CHECK(s.max == 0.7);
  CHECK(s.median == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("epoch order is a seeded permutation") {
  const auto a = epoch_order(5, 1, 20);
  const auto b = epoch_order(5, 1, 20);
  const auto c = epoch_order(5, 2, 20);
  const auto d = epoch_order(6, 1, 20);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != d);
  std::vector<bool> hit(20, false);
  for (std::size_t i : a) {
    REQUIRE(i < 20);
    hit[i] = true;
  }
  for (bool h : hit) CHECK(h);
}
