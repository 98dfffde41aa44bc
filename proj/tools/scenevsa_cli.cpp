// scenevsa: experiment runner for resonator-network scene decoding.
//
//   scenevsa run      --config base.json --seed 7 --out results/
//   scenevsa sweep    --targets 0.5:1.0:0.05 --out sweep/
//   scenevsa trace    --objects 2 --seed 3
//   scenevsa codebook gen --label digit --size 10 --dim 1000 --seed 42 --out digit.json
//   scenevsa codebook inspect digit.json

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "scenevsa/harness.hpp"
#include "scenevsa/seeding.hpp"

namespace {

using namespace scenevsa;

struct ExperimentFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::optional<int> trials;
  std::optional<int> threads;
  std::string targets;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (overrides RESONATOR_SEED and the config)");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--trials", f.trials, "trials per (object count, noise target)");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--targets", f.targets, "noise targets, lo:hi:step or comma list");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t parse_seed(const std::string& text, const char* source) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(std::string(source) + ": invalid seed '" + text + "'");
  }
  return v;
}

ExperimentConfig resolve_config(const ExperimentFlags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : config_from_json(read_file(f.config_path));
  if (const char* env = std::getenv("RESONATOR_SEED"); env && *env) cfg.seed = parse_seed(env, "RESONATOR_SEED");
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.threads) cfg.threads = *f.threads;
  if (!f.targets.empty()) cfg.noise_targets = parse_targets(f.targets);
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentResult& result) {
  // Mean realized similarity per group alongside the all-correct fraction at
  // the largest run budget.
  std::map<std::pair<int, double>, std::pair<double, int>> sim;
  for (const TrialRecord& r : result.trials) {
    auto& [sum, n] = sim[{r.object_count, r.noise_target}];
    sum += r.gt_similarity;
    ++n;
  }
  std::map<std::pair<int, double>, const AccuracyRow*> best;
  for (const AccuracyRow& row : result.table.accuracy) {
    if (row.k_correct != row.object_count) continue;
    auto& slot = best[{row.object_count, row.noise_target}];
    if (!slot || row.runs_allowed > slot->runs_allowed) slot = &row;
  }
  std::printf("%8s %8s %10s %6s %12s %8s\n", "objects", "target", "gt_sim", "runs", "all_correct", "trials");
  for (const auto& [key, row] : best) {
    const auto [sum, n] = sim[key];
    std::printf("%8d %8.3f %10.4f %6d %12.4f %8d\n", key.first, key.second, sum / n, row->runs_allowed,
                row->fraction, row->trial_count);
  }
  const IterationStats& it = result.table.iterations;
  std::printf("resonator runs: %d  mean iterations: %.2f  p95: %d  max: %d  converged: %.4f\n", it.runs, it.mean,
              it.p95, it.max, it.converged_fraction);
}

int run_command(const ExperimentFlags& f) {
  const ExperimentConfig cfg = resolve_config(f);
  const ExperimentResult result = run_experiment(cfg);
  write_results(f.out, result);
  print_summary(result);
  std::fprintf(stderr, "wrote %s/summary.csv, %s/conditional.csv, %s/trials.jsonl\n", f.out.c_str(), f.out.c_str(),
               f.out.c_str());
  return 0;
}

struct TraceFlags {
  std::string config_path;
  int objects = 1;
  std::optional<std::uint64_t> seed;
  double target = 1.0;
  std::optional<int> runs;
  std::string out;
};

int trace_command(const TraceFlags& f) {
  ExperimentFlags ef;
  ef.config_path = f.config_path;
  ef.seed = f.seed;
  ExperimentConfig cfg = resolve_config(ef);
  const CodebookSet cbs = experiment_codebooks(cfg);

  Rng rng(derive_seed(cfg.seed, {0x7ace0000ULL, static_cast<std::uint64_t>(f.objects)}));
  const SceneDescription scene = random_scene(f.objects, rng, cfg.sizes);
  const Hypervector clean = encode_scene(cbs, scene);
  const RealVector input = noisy_scene_vector(clean, f.target, rng);

  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw std::runtime_error("cannot open '" + f.out + "' for writing");
  }
  std::ostream& out = f.out.empty() ? std::cout : file;

  int run_index = 0;
  int last_iteration = -1;
  const TraceSink sink = [&](const IterationTrace& t) {
    if (t.iteration <= last_iteration) ++run_index;
    last_iteration = t.iteration;
    out << trace_to_json(run_index, t) << '\n';
  };
  const int runs = f.runs.value_or(f.objects);
  const DecodedScene decoded = decode_scene(input, cbs, cfg.resonator, runs, cfg.energy_threshold_per_dim * cfg.dim,
                                            rng, sink);
  const MatchResult match = match_objects(decoded, scene);
  std::cerr << "scene:   " << scene_to_json(scene) << '\n'
            << "decoded: " << decoded_to_json(decoded) << '\n'
            << "correct: " << match.correct << '/' << scene.objects.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonator-network factorization of compositional scene vectors"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  auto* run = app.add_subcommand("run", "run an experiment and write summary.csv / trials.jsonl");
  add_experiment_flags(run, run_flags);

  ExperimentFlags sweep_flags;
  sweep_flags.targets = "0.5:1.0:0.05";
  sweep_flags.out = "sweep";
  auto* sweep = app.add_subcommand("sweep", "run an experiment over a grid of noise targets");
  add_experiment_flags(sweep, sweep_flags);

  TraceFlags trace_flags;
  auto* trace = app.add_subcommand("trace", "decode one random scene, emitting per-iteration similarity scores");
  trace->add_option("--config", trace_flags.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  trace->add_option("--objects", trace_flags.objects, "objects in the scene")->capture_default_str();
  trace->add_option("--seed", trace_flags.seed, "master seed");
  trace->add_option("--target", trace_flags.target, "noise target similarity")->capture_default_str();
  trace->add_option("--runs", trace_flags.runs, "resonator runs (default: object count)");
  trace->add_option("--out", trace_flags.out, "trace file (default: stdout)");

  auto* codebook = app.add_subcommand("codebook", "generate or inspect a codebook");
  codebook->require_subcommand(1);
  std::string gen_label = "digit";
  int gen_size = 10;
  int gen_dim = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = codebook->add_subcommand("gen", "generate a codebook as JSON");
  gen->add_option("--label", gen_label, "color | digit | ypos | xpos")->capture_default_str();
  gen->add_option("--size", gen_size, "number of codewords K")->capture_default_str();
  gen->add_option("--dim", gen_dim, "dimension N")->capture_default_str();
  gen->add_option("--seed", gen_seed, "seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output file (default: stdout)");
  std::string inspect_path;
  auto* inspect = codebook->add_subcommand("inspect", "print codebook metadata and statistics");
  inspect->add_option("file", inspect_path, "codebook JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_flags);
    if (sweep->parsed()) return run_command(sweep_flags);
    if (trace->parsed()) return trace_command(trace_flags);
    if (gen->parsed()) {
      const Codebook cb = Codebook::generate(attribute_from_string(gen_label), gen_size, gen_dim, gen_seed);
      if (gen_out.empty()) {
        std::cout << codebook_to_json(cb) << '\n';
      } else {
        save_codebook(cb, gen_out);
      }
      return 0;
    }
    if (inspect->parsed()) {
      const Codebook cb = load_codebook(inspect_path);
      std::printf("label: %s\nsize:  %d\ndim:   %d\nseed:  %llu\nmax |cos| between codewords: %.4f\n",
                  std::string(to_string(cb.label())).c_str(), cb.size(), cb.dim(),
                  static_cast<unsigned long long>(cb.seed()), max_pairwise_similarity(cb));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
