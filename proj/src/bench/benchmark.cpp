#include "ddsc/bench/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <ostream>
#include <stdexcept>

#include "ddsc/rng.hpp"

namespace ddsc::bench {

namespace {

constexpr std::uint64_t kSeedStream = 0x5eed;

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

Moments moments(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_double6(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  if (config.strategies.empty()) throw std::invalid_argument("no strategies selected");
  if (config.seeds.empty()) throw std::invalid_argument("no seeds selected");
  config.dataset.validate();
  config.schedule.validate();

  struct Accumulator {
    std::vector<double> overall, seen, unseen;
  };
  std::map<std::string, Accumulator> by_strategy;

  BenchmarkReport report;
  for (std::uint64_t seed : config.seeds) {
    SyntheticSpec spec = config.dataset;
    spec.seed = rng::mix(config.dataset.seed, rng::mix(seed, kSeedStream));
    Dataset dataset = generate_dataset(spec);
    Standardizer::fit(dataset.train).apply(dataset);

    for (Strategy strategy : config.strategies) {
      try {
        RunResult result = run_strategy(strategy, dataset, config.schedule, config.trainer,
                                        seed, config.checkpoint_dir);
        Accumulator& acc = by_strategy[std::string(strategy_name(strategy))];
        acc.overall.push_back(result.final_accuracy.overall);
        acc.seen.push_back(result.final_accuracy.seen);
        acc.unseen.push_back(result.final_accuracy.unseen);
        for (CurveRow& row : result.rows) report.rows.push_back(std::move(row));
      } catch (const std::exception& e) {
        throw std::runtime_error("(strategy=" + std::string(strategy_name(strategy)) +
                                 ", seed=" + std::to_string(seed) + "): " + e.what());
      }
    }
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const CurveRow& a, const CurveRow& b) {
              if (a.strategy != b.strategy) return a.strategy < b.strategy;
              if (a.seed != b.seed) return a.seed < b.seed;
              return a.epoch < b.epoch;
            });

  for (const auto& [name, acc] : by_strategy) {
    StrategySummary s;
    s.strategy = name;
    s.runs = acc.overall.size();
    const Moments o = moments(acc.overall);
    const Moments sn = moments(acc.seen);
    const Moments un = moments(acc.unseen);
    s.mean_overall = o.mean;
    s.std_overall = o.stddev;
    s.mean_seen = sn.mean;
    s.std_seen = sn.stddev;
    s.mean_unseen = un.mean;
    s.std_unseen = un.stddev;
    report.summary.push_back(std::move(s));
  }
  return report;
}

void write_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows,
                      bool timestamp_header) {
  if (timestamp_header) out << "# generated " << utc_timestamp() << "\n";
  out << "strategy,seed,epoch,lambda,train_loss,acc_overall,acc_seen,acc_unseen,"
         "weight_entropy\n";
  for (const CurveRow& row : rows) {
    out << row.strategy << ',' << row.seed << ',' << row.epoch << ','
        << format_double6(row.lambda) << ',' << format_double6(row.train_loss) << ','
        << format_double6(row.acc_overall) << ',' << format_double6(row.acc_seen) << ','
        << format_double6(row.acc_unseen) << ',' << format_double6(row.weight_entropy)
        << '\n';
  }
}

void write_summary(std::ostream& out, const BenchmarkReport& report) {
  out << "benchmark summary (class-wise average accuracy, mean +- std over seeds)\n";
  for (const StrategySummary& s : report.summary) {
    out << "strategy " << s.strategy << ": overall " << format_double6(s.mean_overall)
        << " +- " << format_double6(s.std_overall) << "  seen "
        << format_double6(s.mean_seen) << " +- " << format_double6(s.std_seen)
        << "  unseen " << format_double6(s.mean_unseen) << " +- "
        << format_double6(s.std_unseen) << "  (runs=" << s.runs << ")\n";
  }
}

}  // namespace ddsc::bench
