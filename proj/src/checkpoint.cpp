#include "ddsc/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ddsc {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "ddsc-checkpoint";
constexpr int kFormatVersion = 1;

json ledger_to_json(const SampleLedger& ledger) {
  const SampleLedger::Snapshot snap = ledger.snapshot();
  json invariance = json::array();
  for (const auto& v : snap.invariance) {
    if (v.has_value()) {
      invariance.push_back(*v);
    } else {
      invariance.push_back(nullptr);
    }
  }
  return json{{"previous_loss", snap.previous_loss},
              {"loss_change", snap.loss_change},
              {"progress", snap.progress},
              {"invariance", invariance},
              {"score", snap.score},
              {"weight", snap.weight},
              {"finalized_epochs", snap.finalized_epochs}};
}

SampleLedger ledger_from_json(const json& j) {
  SampleLedger::Snapshot snap;
  snap.previous_loss = j.at("previous_loss").get<std::vector<double>>();
  snap.loss_change = j.at("loss_change").get<std::vector<double>>();
  snap.progress = j.at("progress").get<std::vector<double>>();
  snap.score = j.at("score").get<std::vector<double>>();
  snap.weight = j.at("weight").get<std::vector<double>>();
  snap.finalized_epochs = j.at("finalized_epochs").get<int>();
  for (const json& v : j.at("invariance")) {
    if (v.is_null()) {
      snap.invariance.emplace_back(std::nullopt);
    } else {
      snap.invariance.emplace_back(v.get<double>());
    }
  }
  return SampleLedger::restore(snap);
}

json bank_to_json(const PrototypeBank& bank) {
  return json{{"prototypes", bank.prototypes},
              {"seen", bank.seen},
              {"gamma", bank.gamma},
              {"last_update_epoch", bank.last_update_epoch}};
}

PrototypeBank bank_from_json(const json& j) {
  PrototypeBank bank;
  bank.prototypes = j.at("prototypes").get<std::vector<std::vector<double>>>();
  bank.seen = j.at("seen").get<std::vector<bool>>();
  bank.gamma = j.at("gamma").get<double>();
  bank.last_update_epoch = j.at("last_update_epoch").get<int>();
  if (bank.seen.size() != bank.prototypes.size()) {
    throw std::runtime_error("bank seen/prototype length mismatch");
  }
  return bank;
}

}  // namespace

void save_checkpoint(const CurriculumState& state, const std::string& path) {
  json samples_device = json::array();
  json samples_label = json::array();
  for (const SampleMeta& meta : state.samples) {
    samples_device.push_back(meta.device);
    samples_label.push_back(meta.label);
  }
  const json doc{{"format", kFormatTag},
                 {"version", kFormatVersion},
                 {"epoch", state.epoch},
                 {"seed", state.seed},
                 {"batch_size", state.batch_size},
                 {"next_lambda", state.next_lambda},
                 {"config",
                  {{"epochs", state.config.epochs},
                   {"lambda_min", state.config.lambda_min},
                   {"tau", state.config.tau},
                   {"beta", state.config.beta},
                   {"gamma", state.config.gamma},
                   {"eta_h", state.config.eta_h},
                   {"epsilon", state.config.epsilon}}},
                 {"samples", {{"device", samples_device}, {"label", samples_label}}},
                 {"bank", bank_to_json(state.bank)},
                 {"ledger", ledger_to_json(state.ledger)}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for checkpoint: " + path);
}

CurriculumState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("unreadable checkpoint: cannot open " + path);
  try {
    const json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw std::runtime_error("unrecognized format tag");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw std::runtime_error("unsupported format version");
    }

    CurriculumState state;
    state.epoch = doc.at("epoch").get<int>();
    state.seed = doc.at("seed").get<std::uint64_t>();
    state.batch_size = doc.at("batch_size").get<std::size_t>();
    state.next_lambda = doc.at("next_lambda").get<double>();

    const json& cfg = doc.at("config");
    state.config.epochs = cfg.at("epochs").get<int>();
    state.config.lambda_min = cfg.at("lambda_min").get<double>();
    state.config.tau = cfg.at("tau").get<double>();
    state.config.beta = cfg.at("beta").get<double>();
    state.config.gamma = cfg.at("gamma").get<double>();
    state.config.eta_h = cfg.at("eta_h").get<double>();
    state.config.epsilon = cfg.at("epsilon").get<double>();

    const auto device = doc.at("samples").at("device").get<std::vector<int>>();
    const auto label = doc.at("samples").at("label").get<std::vector<int>>();
    if (device.size() != label.size()) {
      throw std::runtime_error("sample device/label length mismatch");
    }
    state.samples.resize(device.size());
    for (std::size_t i = 0; i < device.size(); ++i) {
      state.samples[i] = SampleMeta{device[i], label[i]};
    }

    state.bank = bank_from_json(doc.at("bank"));
    state.ledger = ledger_from_json(doc.at("ledger"));
    return state;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("unreadable checkpoint: ") + e.what());
  }
}

}  // namespace ddsc
