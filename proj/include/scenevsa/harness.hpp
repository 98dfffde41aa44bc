#pragma once

// Monte-Carlo evaluation: scene generation, noise channel, decoding and
// accuracy tables. Every trial draws from its own stream seeded by
// (master seed, object count, trial index), so results do not depend on
// trial order or thread count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenevsa/decoder.hpp"
#include "scenevsa/resonator.hpp"
#include "scenevsa/scene.hpp"

namespace scenevsa {

/// How many resonator runs each trial is allowed.
enum class RunsPolicy {
  fixed,         // max_runs for every scene
  object_count,  // the true object count
  estimated,     // round(|s|^2 / N) of the (possibly noisy) input
};

std::string_view to_string(RunsPolicy p);
RunsPolicy runs_policy_from_string(std::string_view name);

struct ExperimentConfig {
  int dim = 1000;
  AttributeSizes sizes = kDefaultSizes;
  std::vector<int> object_counts{1, 2, 3};
  int trials = 1000;  // per (object count, noise target)
  std::vector<double> noise_targets{1.0};
  ResonatorConfig resonator;
  int max_runs = 3;
  RunsPolicy runs_policy = RunsPolicy::fixed;
  double energy_threshold_per_dim = 0.5;  // halting threshold is this times N
  double bin_width = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& cfg);

struct TrialRecord {
  int object_count = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  SceneDescription scene;
  double noise_target = 1.0;
  double gt_similarity = 1.0;  // realized cosine of the noisy input to the clean scene vector
  int runs_allowed = 0;
  DecodedScene decoded;
  int objects_correct = 0;
  bool all_correct = false;
};

struct AccuracyRow {
  int object_count = 0;
  double noise_target = 0.0;
  int runs_allowed = 0;
  int k_correct = 0;
  double fraction = 0.0;  // trials with at least k correct among the first runs_allowed decodes
  int trial_count = 0;
};

struct SimilarityBin {
  double lower = 0.0;
  double upper = 0.0;
  int count = 0;
  std::optional<double> accuracy;  // all-correct fraction; empty when count == 0
};

struct IterationStats {
  int runs = 0;
  double mean = 0.0;
  int p95 = 0;
  int max = 0;
  double converged_fraction = 0.0;
};

struct ResultTable {
  std::vector<AccuracyRow> accuracy;
  std::vector<SimilarityBin> conditional;
  IterationStats iterations;
};

struct ExperimentResult {
  ResultTable table;
  std::vector<TrialRecord> trials;
};

/// Codebooks for an experiment, derived from its master seed.
CodebookSet experiment_codebooks(const ExperimentConfig& cfg);

/// Runs one trial. Pure given (cfg, codebooks, object count, target, index).
TrialRecord run_trial(const ExperimentConfig& cfg, const CodebookSet& cbs, int object_count,
                      double noise_target, int trial_index);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Aggregates recomputed from trial records alone.
ResultTable summarize(const std::vector<TrialRecord>& records, double bin_width);

/// All-correct fraction binned by realized GT similarity. Bins are
/// [i * w, (i + 1) * w) and cover every index from the lowest to the highest
/// occupied one.
std::vector<SimilarityBin> conditional_accuracy(const std::vector<TrialRecord>& records, double bin_width);

IterationStats iteration_stats(const std::vector<TrialRecord>& records);

/// "lo:hi:step" (inclusive grid) or a comma-separated list.
std::vector<double> parse_targets(std::string_view spec);

// Output formats.
void write_summary_csv(std::ostream& out, const ResultTable& table);
void write_conditional_csv(std::ostream& out, const std::vector<SimilarityBin>& bins);
std::string trial_to_json(const TrialRecord& record);
void write_trials_jsonl(std::ostream& out, const std::vector<TrialRecord>& records);
std::string trace_to_json(int run, const IterationTrace& trace);

/// summary.csv, conditional.csv and trials.jsonl under `dir` (created if missing).
void write_results(const std::string& dir, const ExperimentResult& result);

}  // namespace scenevsa
