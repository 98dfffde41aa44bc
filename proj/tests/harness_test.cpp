#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "scenevsa/harness.hpp"

namespace scenevsa {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.object_counts = {1, 2};
  cfg.trials = 40;
  cfg.noise_targets = {1.0, 0.4};
  cfg.max_runs = 3;
  cfg.seed = 17;
  return cfg;
}

TrialRecord record(double gt, bool correct, int object_count = 1) {
  TrialRecord r;
  r.object_count = object_count;
  r.gt_similarity = gt;
  r.all_correct = correct;
  return r;
}

std::string summary_csv(const ResultTable& t) {
  std::ostringstream out;
  write_summary_csv(out, t);
  return out.str();
}

// All-correct fraction using every allowed run.
double all_correct_fraction(const ResultTable& t, int object_count, double target) {
  std::optional<AccuracyRow> best;
  for (const AccuracyRow& r : t.accuracy) {
    if (r.object_count == object_count && r.noise_target == target && r.k_correct == object_count &&
        (!best || r.runs_allowed > best->runs_allowed)) {
      best = r;
    }
  }
  if (!best) throw std::logic_error("row not found");
  return best->fraction;
}

TEST(Experiment, SameSeedGivesIdenticalResults) {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  EXPECT_EQ(summary_csv(a.table), summary_csv(b.table));
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(trial_to_json(a.trials[i]), trial_to_json(b.trials[i]));
}

TEST(Experiment, ThreadCountDoesNotChangeRecords) {
  ExperimentConfig cfg = small_config();
  const ExperimentResult serial = run_experiment(cfg);
  cfg.threads = 3;
  const ExperimentResult parallel = run_experiment(cfg);
  ASSERT_EQ(serial.trials.size(), parallel.trials.size());
  for (std::size_t i = 0; i < serial.trials.size(); ++i) {
    EXPECT_EQ(trial_to_json(serial.trials[i]), trial_to_json(parallel.trials[i]));
  }
  EXPECT_EQ(summary_csv(serial.table), summary_csv(parallel.table));
}

TEST(Experiment, TrialsAreIndependentOfScheduling) {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult full = run_experiment(cfg);
  const CodebookSet cbs = experiment_codebooks(cfg);
  for (const TrialRecord& r : {full.trials[57], full.trials[3], full.trials[121]}) {
    EXPECT_EQ(trial_to_json(run_trial(cfg, cbs, r.object_count, r.noise_target, r.trial_index)), trial_to_json(r));
  }
}

TEST(Experiment, DifferentSeedsDiffer) {
  ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  cfg.seed = 18;
  const ExperimentResult b = run_experiment(cfg);
  EXPECT_NE(trial_to_json(a.trials[0]), trial_to_json(b.trials[0]));
}

TEST(Experiment, RecordInvariants) {
  const ExperimentResult res = run_experiment(small_config());
  for (const TrialRecord& r : res.trials) {
    EXPECT_GE(r.gt_similarity, -1.0);
    EXPECT_LE(r.gt_similarity, 1.0);
    EXPECT_LE(r.objects_correct, static_cast<int>(r.scene.objects.size()));
    EXPECT_EQ(r.all_correct, r.objects_correct == r.object_count);
    EXPECT_LE(r.decoded.runs_executed, r.runs_allowed);
    if (r.noise_target == 1.0) EXPECT_EQ(r.gt_similarity, 1.0);
  }
}

TEST(Experiment, SummaryIsAPureFoldOfTheRecords) {
  const ExperimentConfig cfg = small_config();
  ExperimentResult res = run_experiment(cfg);
  const std::string expected = summary_csv(res.table);
  std::reverse(res.trials.begin(), res.trials.end());
  const ResultTable again = summarize(res.trials, cfg.bin_width);
  EXPECT_EQ(summary_csv(again), expected);

  int binned = 0;
  for (const SimilarityBin& b : again.conditional) binned += b.count;
  EXPECT_EQ(binned, static_cast<int>(res.trials.size()));
  for (const AccuracyRow& r : again.accuracy) {
    EXPECT_GE(r.fraction, 0.0);
    EXPECT_LE(r.fraction, 1.0);
  }
}

TEST(Summarize, FractionsCountAtLeastKCorrectWithinFirstRuns) {
  const SceneDescription scene{{{0, 0, 0, 0}, {1, 1, 1, 1}}};
  auto trial = [&](std::vector<ObjectSpec> decodes) {
    TrialRecord r;
    r.object_count = 2;
    r.noise_target = 1.0;
    r.scene = scene;
    r.runs_allowed = 3;
    for (const ObjectSpec& o : decodes) r.decoded.objects.push_back({o, 1, true});
    r.objects_correct = match_objects(r.decoded, scene).correct;
    r.all_correct = r.objects_correct == 2;
    return r;
  };
  const std::vector<TrialRecord> records{
      trial({{0, 0, 0, 0}, {1, 1, 1, 1}}),             // both in two runs
      trial({{5, 5, 2, 2}, {0, 0, 0, 0}, {1, 1, 1, 1}}),  // needs the third run
      trial({{1, 1, 1, 1}, {1, 1, 1, 1}, {4, 4, 0, 0}}),  // one, duplicated
      trial({{6, 6, 2, 2}, {6, 6, 2, 2}, {6, 6, 2, 2}}),  // none
  };
  const ResultTable t = summarize(records, 0.05);
  ASSERT_EQ(t.accuracy.size(), 6u);
  const double expected[3][2] = {{0.5, 0.0}, {0.75, 0.25}, {0.75, 0.5}};
  for (const AccuracyRow& r : t.accuracy) {
    EXPECT_EQ(r.trial_count, 4);
    EXPECT_DOUBLE_EQ(r.fraction, expected[r.runs_allowed - 1][r.k_correct - 1]) << r.runs_allowed << "," << r.k_correct;
  }
}

TEST(ConditionalAccuracy, AllAtOneIsASingleBin) {
  const std::vector<TrialRecord> records{record(1.0, true), record(1.0, false), record(1.0, true)};
  const auto bins = conditional_accuracy(records, 0.05);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].count, 3);
  EXPECT_NEAR(*bins[0].accuracy, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(bins[0].lower, 1.0, 1e-12);
}

TEST(ConditionalAccuracy, EmptyBinsHaveNullAccuracyAndCountsSum) {
  const std::vector<TrialRecord> records{record(0.12, false), record(0.13, true), record(0.31, true),
                                         record(0.85, true)};
  const auto bins = conditional_accuracy(records, 0.1);
  ASSERT_EQ(bins.size(), 8u);
  EXPECT_EQ(bins[0].count, 2);
  EXPECT_DOUBLE_EQ(*bins[0].accuracy, 0.5);
  EXPECT_EQ(bins[1].count, 0);
  EXPECT_FALSE(bins[1].accuracy.has_value());
  EXPECT_EQ(bins[7].count, 1);
  int total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, 4);

  std::ostringstream out;
  write_conditional_csv(out, bins);
  EXPECT_NE(out.str().find("0.2000,0.3000,0,\n"), std::string::npos);
}

TEST(ConditionalAccuracy, EdgeValuesLandInTheUpperBin) {
  const auto bins = conditional_accuracy({record(0.85, true), record(0.9, true)}, 0.05);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_NEAR(bins[0].lower, 0.85, 1e-12);
  EXPECT_EQ(bins[0].count, 1);
  EXPECT_EQ(bins[1].count, 1);
}

TEST(ConditionalAccuracy, RejectsBadWidth) {
  EXPECT_THROW(conditional_accuracy({record(0.5, true)}, 0.0), std::invalid_argument);
  EXPECT_THROW(conditional_accuracy({record(0.5, true)}, 1.5), std::invalid_argument);
}

TEST(IterationStats, NearestRankPercentile) {
  TrialRecord r;
  for (int i = 1; i <= 20; ++i) r.decoded.objects.push_back({{}, i, i != 20});
  const IterationStats s = iteration_stats({r});
  EXPECT_EQ(s.runs, 20);
  EXPECT_DOUBLE_EQ(s.mean, 10.5);
  EXPECT_EQ(s.p95, 19);
  EXPECT_EQ(s.max, 20);
  EXPECT_DOUBLE_EQ(s.converged_fraction, 0.95);
}

TEST(ParseTargets, GridAndList) {
  const auto grid = parse_targets("0.5:1.0:0.05");
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_EQ(grid.front(), 0.5);
  EXPECT_EQ(grid[2], 0.6);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_EQ(parse_targets("0.9,0.6"), (std::vector<double>{0.9, 0.6}));
  EXPECT_EQ(parse_targets("1"), std::vector<double>{1.0});
}

TEST(ParseTargets, RejectsMalformedInput) {
  for (const char* bad : {"", "0.5:1.0", "a,b", "0.5:1.0:0", "1.0:0.5:0.1", "0,0.5", "0.5,1.2", "0.5,"}) {
    EXPECT_THROW(parse_targets(bad), std::invalid_argument) << bad;
  }
}

TEST(Config, DefaultsAreValid) { EXPECT_NO_THROW(ExperimentConfig{}.validate()); }

TEST(Config, ValidationNamesTheProblem) {
  auto expect_invalid = [](auto mutate, const std::string& needle) {
    ExperimentConfig cfg;
    mutate(cfg);
    try {
      cfg.validate();
      FAIL() << "expected failure mentioning " << needle;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_invalid([](ExperimentConfig& c) { c.trials = 0; }, "trials");
  expect_invalid([](ExperimentConfig& c) { c.noise_targets = {0.0}; }, "noise target");
  expect_invalid([](ExperimentConfig& c) { c.noise_targets = {1.5}; }, "noise target");
  expect_invalid([](ExperimentConfig& c) { c.object_counts = {10}; }, "object count");
  expect_invalid([](ExperimentConfig& c) { c.resonator.max_iterations = 0; }, "max_iterations");
  expect_invalid([](ExperimentConfig& c) { c.max_runs = 0; }, "max_runs");
  expect_invalid([](ExperimentConfig& c) { c.bin_width = 0.0; }, "bin_width");
  expect_invalid([](ExperimentConfig& c) { c.dim = 0; }, "dim");
  ExperimentConfig bad;
  bad.trials = 0;
  EXPECT_THROW(run_experiment(bad), std::invalid_argument);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig cfg;
  cfg.dim = 512;
  cfg.sizes = {5, 6, 3, 2};
  cfg.object_counts = {2, 4};
  cfg.trials = 77;
  cfg.noise_targets = {0.9, 0.35};
  cfg.resonator.max_iterations = 50;
  cfg.resonator.activation = Activation::normalization;
  cfg.resonator.init_mode = InitMode::bundled_codewords;
  cfg.resonator.synchronous = false;
  cfg.resonator.restart_spurious = false;
  cfg.max_runs = 4;
  cfg.runs_policy = RunsPolicy::estimated;
  cfg.energy_threshold_per_dim = 0.25;
  cfg.bin_width = 0.1;
  cfg.seed = 123456789012345ULL;
  cfg.threads = 2;
  const std::string text = config_to_json(cfg);
  EXPECT_EQ(config_to_json(config_from_json(text)), text);
}

TEST(Config, PartialJsonKeepsDefaults) {
  const ExperimentConfig cfg = config_from_json(R"({"trials": 5, "decoder": {"runs_policy": "object_count"}})");
  EXPECT_EQ(cfg.trials, 5);
  EXPECT_EQ(cfg.runs_policy, RunsPolicy::object_count);
  EXPECT_EQ(cfg.dim, 1000);
  EXPECT_EQ(cfg.max_runs, 3);
  EXPECT_EQ(cfg.resonator.max_iterations, 200);
}

TEST(Config, MalformedJsonThrows) {
  EXPECT_THROW(config_from_json("{"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"trials": "many"})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"decoder": {"runs_policy": "sometimes"}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"resonator": {"activation": "tanh"}})"), std::invalid_argument);
}

TEST(Output, SummaryCsvSchema) {
  const ExperimentResult res = run_experiment(small_config());
  const std::string csv = summary_csv(res.table);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "object_count,noise_target,runs_allowed,k_correct,fraction,trial_count");
  EXPECT_NE(csv.find("\n1,1.0000,1,1,"), std::string::npos);
}

TEST(Output, WriteResultsCreatesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "scenevsa_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = small_config();
  cfg.trials = 5;
  const ExperimentResult res = run_experiment(cfg);
  write_results(dir.string(), res);
  for (const char* name : {"summary.csv", "conditional.csv", "trials.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  std::ifstream in(dir / "trials.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, static_cast<int>(res.trials.size()));
  std::filesystem::remove_all(dir);
}

TEST(Output, TraceLineHasEveryCodebookScore) {
  IterationTrace t;
  t.iteration = 4;
  for (Attribute a : kAttributes) t.scores[static_cast<int>(a)] = RealVector::Zero(kDefaultSizes[static_cast<int>(a)]);
  const std::string line = trace_to_json(2, t);
  EXPECT_NE(line.find(R"("run":2)"), std::string::npos);
  EXPECT_NE(line.find(R"("iteration":4)"), std::string::npos);
  EXPECT_NE(line.find(R"("digit":[0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0])"), std::string::npos);
}

// Accuracy ordering across noise levels, 1,000 trials per condition.
TEST(NoiseSweep, CleanerInputIsDecodedAtLeastAsWell) {
  ExperimentConfig cfg;
  cfg.object_counts = {1, 2, 3};
  cfg.trials = 1000;
  cfg.noise_targets = {0.9, 0.6, 0.5};
  cfg.runs_policy = RunsPolicy::object_count;
  cfg.seed = 3;
  const ResultTable t = run_experiment(cfg).table;
  for (int l : {1, 2, 3}) {
    EXPECT_GE(all_correct_fraction(t, l, 0.9), all_correct_fraction(t, l, 0.6)) << l;
  }
  EXPECT_LT(all_correct_fraction(t, 3, 0.5), all_correct_fraction(t, 3, 0.9));
}

}  // namespace
}  // namespace scenevsa
