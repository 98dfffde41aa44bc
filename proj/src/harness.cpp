#include "scenevsa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "scenevsa/seeding.hpp"

namespace scenevsa {

using nlohmann::json;

std::string_view to_string(RunsPolicy p) {
  switch (p) {
    case RunsPolicy::fixed: return "fixed";
    case RunsPolicy::object_count: return "object_count";
    case RunsPolicy::estimated: return "estimated";
  }
  return "unknown";
}

RunsPolicy runs_policy_from_string(std::string_view name) {
  for (RunsPolicy p : {RunsPolicy::fixed, RunsPolicy::object_count, RunsPolicy::estimated}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown runs policy '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (dim < 1) fail("dim must be >= 1");
  for (int k : sizes) {
    if (k < 2) fail("codebook sizes must be >= 2");
  }
  const int cells = sizes[static_cast<int>(Attribute::ypos)] * sizes[static_cast<int>(Attribute::xpos)];
  if (object_counts.empty()) fail("object_counts is empty");
  for (int l : object_counts) {
    if (l < 1 || l > cells) fail("object count " + std::to_string(l) + " outside [1, " + std::to_string(cells) + "]");
  }
  if (trials < 1) fail("trials must be >= 1");
  if (noise_targets.empty()) fail("noise_targets is empty");
  for (double t : noise_targets) {
    if (!(t > 0.0 && t <= 1.0)) fail("noise target " + std::to_string(t) + " outside (0, 1]");
  }
  if (resonator.max_iterations < 1) fail("max_iterations must be >= 1");
  if (max_runs < 1) fail("max_runs must be >= 1");
  if (!(energy_threshold_per_dim >= 0.0)) fail("energy_threshold_per_dim must be >= 0");
  if (!(bin_width > 0.0 && bin_width <= 1.0)) fail("bin_width must be in (0, 1]");
  if (threads < 1) fail("threads must be >= 1");
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.dim = j.value("dim", cfg.dim);
    if (j.contains("codebook_sizes")) {
      const auto& cs = j.at("codebook_sizes");
      for (Attribute a : kAttributes) {
        cfg.sizes[static_cast<int>(a)] = cs.value(std::string(to_string(a)), cfg.sizes[static_cast<int>(a)]);
      }
    }
    cfg.object_counts = j.value("object_counts", cfg.object_counts);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.noise_targets = j.value("noise_targets", cfg.noise_targets);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.bin_width = j.value("bin_width", cfg.bin_width);
    if (j.contains("resonator")) {
      const auto& r = j.at("resonator");
      cfg.resonator.max_iterations = r.value("max_iterations", cfg.resonator.max_iterations);
      const std::string act = r.value("activation", std::string("sign"));
      if (act == "sign") {
        cfg.resonator.activation = Activation::sign;
      } else if (act == "normalization") {
        cfg.resonator.activation = Activation::normalization;
      } else {
        throw std::invalid_argument("config: unknown activation '" + act + "'");
      }
      const std::string init = r.value("init_mode", std::string("random_bipolar"));
      if (init == "random_bipolar") {
        cfg.resonator.init_mode = InitMode::random_bipolar;
      } else if (init == "bundled_codewords") {
        cfg.resonator.init_mode = InitMode::bundled_codewords;
      } else {
        throw std::invalid_argument("config: unknown init_mode '" + init + "'");
      }
      cfg.resonator.synchronous = r.value("synchronous", cfg.resonator.synchronous);
      cfg.resonator.restart_spurious = r.value("restart_spurious", cfg.resonator.restart_spurious);
    }
    if (j.contains("decoder")) {
      const auto& d = j.at("decoder");
      cfg.max_runs = d.value("max_runs", cfg.max_runs);
      cfg.runs_policy = runs_policy_from_string(d.value("runs_policy", std::string("fixed")));
      cfg.energy_threshold_per_dim = d.value("energy_threshold_per_dim", cfg.energy_threshold_per_dim);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json sizes;
  for (Attribute a : kAttributes) sizes[std::string(to_string(a))] = cfg.sizes[static_cast<int>(a)];
  json j{
      {"dim", cfg.dim},
      {"codebook_sizes", sizes},
      {"object_counts", cfg.object_counts},
      {"trials", cfg.trials},
      {"noise_targets", cfg.noise_targets},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"bin_width", cfg.bin_width},
      {"resonator",
       {{"max_iterations", cfg.resonator.max_iterations},
        {"activation", cfg.resonator.activation == Activation::sign ? "sign" : "normalization"},
        {"init_mode", cfg.resonator.init_mode == InitMode::random_bipolar ? "random_bipolar" : "bundled_codewords"},
        {"synchronous", cfg.resonator.synchronous},
        {"restart_spurious", cfg.resonator.restart_spurious}}},
      {"decoder",
       {{"max_runs", cfg.max_runs},
        {"runs_policy", std::string(to_string(cfg.runs_policy))},
        {"energy_threshold_per_dim", cfg.energy_threshold_per_dim}}},
  };
  return j.dump(2);
}

CodebookSet experiment_codebooks(const ExperimentConfig& cfg) {
  return CodebookSet::generate(cfg.dim, cfg.sizes, cfg.seed);
}

TrialRecord run_trial(const ExperimentConfig& cfg, const CodebookSet& cbs, int object_count,
                      double noise_target, int trial_index) {
  TrialRecord rec;
  rec.object_count = object_count;
  rec.trial_index = trial_index;
  // The noise target is deliberately not part of the seed: every target sees
  // the same scenes, noise directions and initial states.
  rec.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(object_count), static_cast<std::uint64_t>(trial_index)});
  rec.noise_target = noise_target;
  Rng rng(rec.seed);

  rec.scene = random_scene(object_count, rng, cfg.sizes);
  const Hypervector clean = encode_scene(cbs, rec.scene);
  const RealVector input = noisy_scene_vector(clean, noise_target, rng);
  rec.gt_similarity = cosine_similarity(input, clean);

  switch (cfg.runs_policy) {
    case RunsPolicy::fixed: rec.runs_allowed = cfg.max_runs; break;
    case RunsPolicy::object_count: rec.runs_allowed = object_count; break;
    case RunsPolicy::estimated: rec.runs_allowed = estimate_object_count(input); break;
  }
  rec.decoded = decode_scene(input, cbs, cfg.resonator, rec.runs_allowed,
                             cfg.energy_threshold_per_dim * cfg.dim, rng);
  rec.objects_correct = match_objects(rec.decoded, rec.scene).correct;
  rec.all_correct = rec.objects_correct == object_count;
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CodebookSet cbs = experiment_codebooks(cfg);

  struct Job {
    int object_count;
    double target;
    int index;
  };
  std::vector<Job> jobs;
  for (int l : cfg.object_counts) {
    for (double t : cfg.noise_targets) {
      for (int i = 0; i < cfg.trials; ++i) jobs.push_back({l, t, i});
    }
  }

  ExperimentResult result;
  result.trials.resize(jobs.size());
  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < jobs.size(); k += stride) {
      result.trials[k] = run_trial(cfg, cbs, jobs[k].object_count, jobs[k].target, jobs[k].index);
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(cfg.threads, jobs.size()));
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
  }
  result.table = summarize(result.trials, cfg.bin_width);
  return result;
}

ResultTable summarize(const std::vector<TrialRecord>& records, double bin_width) {
  ResultTable table;
  std::map<std::pair<int, double>, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& r : records) groups[{r.object_count, r.noise_target}].push_back(&r);

  for (const auto& [key, members] : groups) {
    const auto [object_count, target] = key;
    int runs = 0;
    for (const TrialRecord* r : members) runs = std::max(runs, r->runs_allowed);
    // correct[r - 1][i]: objects matched by the first r decodes of trial i.
    std::vector<std::vector<int>> correct(runs, std::vector<int>(members.size(), 0));
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& decoded = members[i]->decoded.objects;
      for (int r = 1; r <= runs; ++r) {
        const std::size_t n = std::min<std::size_t>(r, decoded.size());
        const std::vector<FactorEstimate> prefix(decoded.begin(), decoded.begin() + n);
        correct[r - 1][i] = match_objects(prefix, members[i]->scene).correct;
      }
    }
    for (int r = 1; r <= runs; ++r) {
      for (int k = 1; k <= object_count; ++k) {
        const auto hits = std::count_if(correct[r - 1].begin(), correct[r - 1].end(), [k](int c) { return c >= k; });
        AccuracyRow row;
        row.object_count = object_count;
        row.noise_target = target;
        row.runs_allowed = r;
        row.k_correct = k;
        row.trial_count = static_cast<int>(members.size());
        row.fraction = static_cast<double>(hits) / row.trial_count;
        table.accuracy.push_back(row);
      }
    }
  }
  table.conditional = conditional_accuracy(records, bin_width);
  table.iterations = iteration_stats(records);
  return table;
}

std::vector<SimilarityBin> conditional_accuracy(const std::vector<TrialRecord>& records, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw std::invalid_argument("conditional_accuracy: bin_width must be in (0, 1]");
  }
  if (records.empty()) return {};
  // A small epsilon keeps values that sit on a bin edge (e.g. 0.85 / 0.05)
  // from falling into the bin below through rounding.
  auto bin_of = [bin_width](double x) { return static_cast<long>(std::floor(x / bin_width + 1e-9)); };
  long lo = bin_of(records.front().gt_similarity);
  long hi = lo;
  for (const TrialRecord& r : records) {
    lo = std::min(lo, bin_of(r.gt_similarity));
    hi = std::max(hi, bin_of(r.gt_similarity));
  }
  std::vector<int> count(hi - lo + 1, 0);
  std::vector<int> correct(hi - lo + 1, 0);
  for (const TrialRecord& r : records) {
    const long b = bin_of(r.gt_similarity) - lo;
    ++count[b];
    correct[b] += r.all_correct ? 1 : 0;
  }
  std::vector<SimilarityBin> bins;
  for (long b = lo; b <= hi; ++b) {
    SimilarityBin bin;
    bin.lower = b * bin_width;
    bin.upper = (b + 1) * bin_width;
    bin.count = count[b - lo];
    if (bin.count > 0) bin.accuracy = static_cast<double>(correct[b - lo]) / bin.count;
    bins.push_back(bin);
  }
  return bins;
}

IterationStats iteration_stats(const std::vector<TrialRecord>& records) {
  std::vector<int> iters;
  int converged = 0;
  for (const TrialRecord& r : records) {
    for (const FactorEstimate& e : r.decoded.objects) {
      iters.push_back(e.iterations_used);
      converged += e.converged ? 1 : 0;
    }
  }
  IterationStats s;
  s.runs = static_cast<int>(iters.size());
  if (iters.empty()) return s;
  std::sort(iters.begin(), iters.end());
  double sum = 0.0;
  for (int i : iters) sum += i;
  s.mean = sum / s.runs;
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * s.runs));
  s.p95 = iters[std::max<std::size_t>(rank, 1) - 1];
  s.max = iters.back();
  s.converged_fraction = static_cast<double>(converged) / s.runs;
  return s;
}

std::vector<double> parse_targets(std::string_view spec) {
  auto to_double = [](std::string_view text) {
    const std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("targets: cannot parse '" + s + "'");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string_view::npos) {
    const auto a = spec.find(':');
    const auto b = spec.find(':', a + 1);
    if (b == std::string_view::npos) throw std::invalid_argument("targets: expected lo:hi:step");
    const double lo = to_double(spec.substr(0, a));
    const double hi = to_double(spec.substr(a + 1, b - a - 1));
    const double step = to_double(spec.substr(b + 1));
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("targets: need step > 0 and hi >= lo");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      // Round to 12 decimals so 0.5 + 2 * 0.05 prints and groups as 0.6.
      out.push_back(std::round((lo + i * step) * 1e12) / 1e12);
    }
  } else {
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      const auto comma = spec.find(',', pos);
      const auto end = comma == std::string_view::npos ? spec.size() : comma;
      out.push_back(to_double(spec.substr(pos, end - pos)));
      pos = end + 1;
    }
  }
  for (double t : out) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("targets: value outside (0, 1]");
  }
  return out;
}

void write_summary_csv(std::ostream& out, const ResultTable& table) {
  out << "object_count,noise_target,runs_allowed,k_correct,fraction,trial_count\n";
  out << std::fixed;
  for (const AccuracyRow& r : table.accuracy) {
    out << r.object_count << ',' << std::setprecision(4) << r.noise_target << ',' << r.runs_allowed << ','
        << r.k_correct << ',' << std::setprecision(6) << r.fraction << ',' << r.trial_count << '\n';
  }
}

void write_conditional_csv(std::ostream& out, const std::vector<SimilarityBin>& bins) {
  out << "bin_lower,bin_upper,count,accuracy\n";
  out << std::fixed;
  for (const SimilarityBin& b : bins) {
    out << std::setprecision(4) << b.lower << ',' << b.upper << ',' << b.count << ',';
    if (b.accuracy) out << std::setprecision(6) << *b.accuracy;
    out << '\n';
  }
}

std::string trial_to_json(const TrialRecord& r) {
  json j{{"object_count", r.object_count},
         {"trial_index", r.trial_index},
         {"seed", r.seed},
         {"scene", json::parse(scene_to_json(r.scene))},
         {"noise_target", r.noise_target},
         {"gt_similarity", r.gt_similarity},
         {"runs_allowed", r.runs_allowed},
         {"decoded", json::parse(decoded_to_json(r.decoded))},
         {"objects_correct", r.objects_correct},
         {"all_correct", r.all_correct}};
  return j.dump();
}

void write_trials_jsonl(std::ostream& out, const std::vector<TrialRecord>& records) {
  for (const TrialRecord& r : records) out << trial_to_json(r) << '\n';
}

std::string trace_to_json(int run, const IterationTrace& trace) {
  json j{{"run", run}, {"iteration", trace.iteration}};
  for (Attribute a : kAttributes) {
    const RealVector& s = trace.scores[static_cast<int>(a)];
    j[std::string(to_string(a))] = std::vector<double>(s.data(), s.data() + s.size());
  }
  return j.dump();
}

void write_results(const std::string& dir, const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    return out;
  };
  {
    auto out = open(base / "summary.csv");
    write_summary_csv(out, result.table);
  }
  {
    auto out = open(base / "conditional.csv");
    write_conditional_csv(out, result.table.conditional);
  }
  {
    auto out = open(base / "trials.jsonl");
    write_trials_jsonl(out, result.trials);
  }
}

}  // namespace scenevsa
