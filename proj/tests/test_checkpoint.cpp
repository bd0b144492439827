#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "ddsc/checkpoint.hpp"
#include "ddsc/engine.hpp"
#include "table_trainer.hpp"

using namespace ddsc;
using ddsc_test::TableTrainer;
using ddsc_test::Tables;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool same_bank(const PrototypeBank& a, const PrototypeBank& b) {
  return a.prototypes == b.prototypes && a.seen == b.seen && a.gamma == b.gamma &&
         a.last_update_epoch == b.last_update_epoch;
}

bool same_ledger(const SampleLedger& a, const SampleLedger& b) {
  if (a.size() != b.size() || a.finalized_epochs() != b.finalized_epochs()) return false;
  if (a.weights() != b.weights()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.previous_loss(i) != b.previous_loss(i)) return false;
    if (a.loss_change(i) != b.loss_change(i)) return false;
    if (a.progress(i) != b.progress(i)) return false;
    if (a.invariance(i) != b.invariance(i)) return false;
    if (a.score(i) != b.score(i)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("state round-trips through the checkpoint file losslessly") {
  std::mt19937_64 g(13);
  const Tables tables = ddsc_test::random_tables(g, 9, 3, 3, 5);
  TableTrainer trainer(tables);
  ScheduleConfig config;
  config.epochs = 3;
  CurriculumEngine engine(config, ddsc_test::meta_of(tables), 3, 42);
  engine.run_epoch(trainer);
  engine.run_epoch(trainer);

  const std::string path = temp_path("ddsc_roundtrip.json");
  save_checkpoint(engine.state(), path);
  const CurriculumState loaded = load_checkpoint(path);

  const CurriculumState& original = engine.state();
  CHECK(loaded.epoch == original.epoch);
  CHECK(loaded.seed == original.seed);
  CHECK(loaded.batch_size == original.batch_size);
  CHECK(loaded.next_lambda == original.next_lambda);
  CHECK(loaded.config.epochs == original.config.epochs);
  CHECK(loaded.config.lambda_min == original.config.lambda_min);
  CHECK(loaded.config.tau == original.config.tau);
  CHECK(loaded.config.beta == original.config.beta);
  CHECK(loaded.config.gamma == original.config.gamma);
  CHECK(loaded.config.eta_h == original.config.eta_h);
  CHECK(loaded.config.epsilon == original.config.epsilon);
  CHECK(same_bank(loaded.bank, original.bank));
  CHECK(same_ledger(loaded.ledger, original.ledger));
  REQUIRE(loaded.samples.size() == original.samples.size());
  for (std::size_t i = 0; i < loaded.samples.size(); ++i) {
    CHECK(loaded.samples[i].device == original.samples[i].device);
    CHECK(loaded.samples[i].label == original.samples[i].label);
  }
  std::remove(path.c_str());
}

TEST_CASE("a fresh state checkpoints with uniform weights and no scores") {
  std::mt19937_64 g(14);
  const Tables tables = ddsc_test::random_tables(g, 4, 1, 2, 3);
  ScheduleConfig config;
  config.epochs = 5;
  CurriculumEngine engine(config, ddsc_test::meta_of(tables), 2, 1);

  const std::string path = temp_path("ddsc_fresh.json");
  save_checkpoint(engine.state(), path);
  const CurriculumState loaded = load_checkpoint(path);
  CHECK(loaded.epoch == 0);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(loaded.ledger.weight(i) == 0.25);
    CHECK_FALSE(loaded.ledger.invariance(i).has_value());
  }
  std::remove(path.c_str());
}

TEST_CASE("resuming from a checkpoint continues the run bit-for-bit") {
  std::mt19937_64 g(15);
  const Tables tables = ddsc_test::random_tables(g, 8, 5, 3, 4);
  ScheduleConfig config;
  config.epochs = 5;

  TableTrainer straight_trainer{Tables(tables)};
  CurriculumEngine straight(config, ddsc_test::meta_of(tables), 3, 77);
  std::vector<EpochReport> straight_reports;
  for (int e = 0; e < 5; ++e) straight_reports.push_back(straight.run_epoch(straight_trainer));

  TableTrainer resumed_trainer{Tables(tables)};
  CurriculumEngine first_half(config, ddsc_test::meta_of(tables), 3, 77);
  for (int e = 0; e < 3; ++e) first_half.run_epoch(resumed_trainer);
  const std::string path = temp_path("ddsc_resume.json");
  save_checkpoint(first_half.state(), path);

  CurriculumEngine resumed(load_checkpoint(path));
  std::vector<EpochReport> tail;
  for (int e = 0; e < 2; ++e) tail.push_back(resumed.run_epoch(resumed_trainer));

  for (int e = 0; e < 2; ++e) {
    CHECK(tail[static_cast<std::size_t>(e)].weights ==
          straight_reports[static_cast<std::size_t>(3 + e)].weights);
    CHECK(tail[static_cast<std::size_t>(e)].weighted_loss ==
          straight_reports[static_cast<std::size_t>(3 + e)].weighted_loss);
  }
  std::remove(path.c_str());
}

TEST_CASE("corrupt or missing checkpoints fail loudly") {
  try {
    load_checkpoint(temp_path("ddsc_does_not_exist.json"));
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("unreadable checkpoint") == 0);
  }

  const std::string path = temp_path("ddsc_corrupt.json");
  {
    std::ofstream out(path);
    out << "{ this is not json";
  }
  try {
    load_checkpoint(path);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("unreadable checkpoint") == 0);
  }

  {
    std::ofstream out(path);
    out << "{\"format\": \"something-else\", \"version\": 1}";
  }
  try {
    load_checkpoint(path);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("unreadable checkpoint") == 0);
  }
  std::remove(path.c_str());
}
