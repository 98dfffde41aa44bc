#pragma once

#include <string>
#include <vector>

#include "scenevsa/resonator.hpp"
#include "scenevsa/scene.hpp"

namespace scenevsa {

enum class HaltReason { max_runs, energy_threshold };

std::string_view to_string(HaltReason h);

struct DecodedScene {
  std::vector<FactorEstimate> objects;       // extraction order
  std::vector<double> residual_energy_trace;  // |residual|^2 after each subtraction
  int runs_executed = 0;
  HaltReason halted_by = HaltReason::max_runs;
};

/// s minus the compound vector reconstructed from the estimate.
template <typename Derived>
Vector<typename Derived::Scalar> explain_away(const Eigen::MatrixBase<Derived>& s, const FactorEstimate& est,
                                              const CodebookSet& cbs) {
  using S = typename Derived::Scalar;
  return s - encode_object(cbs, est.object).template cast<S>();
}

/// Repeated resonator runs with explain-away. Each run starts from a fresh
/// state; the loop halts after max_runs runs or once the residual squared
/// norm falls below energy_threshold.
DecodedScene decode_scene(const RealVector& s, const CodebookSet& cbs, const ResonatorConfig& cfg,
                          int max_runs, double energy_threshold, Rng& rng, const TraceSink& trace = {});

template <typename Derived>
DecodedScene decode_scene(const Eigen::MatrixBase<Derived>& s, const CodebookSet& cbs,
                          const ResonatorConfig& cfg, int max_runs, double energy_threshold, Rng& rng,
                          const TraceSink& trace = {}) {
  return decode_scene(RealVector(s.template cast<double>()), cbs, cfg, max_runs, energy_threshold, rng, trace);
}

/// round(|s|^2 / N), at least 1. Exact on clean scenes up to crosstalk.
template <typename Derived>
int estimate_object_count(const Eigen::MatrixBase<Derived>& s) {
  const double e = s.template cast<double>().squaredNorm() / static_cast<double>(s.size());
  return std::max(1, static_cast<int>(std::lround(e)));
}

struct MatchResult {
  int correct = 0;
  std::vector<bool> decoded_correct;  // per decoded object
  std::vector<bool> truth_hit;        // per ground-truth object
};

/// Greedy at-most-once matching of decoded 4-tuples against the truth.
MatchResult match_objects(const std::vector<FactorEstimate>& decoded, const SceneDescription& truth);

inline MatchResult match_objects(const DecodedScene& decoded, const SceneDescription& truth) {
  return match_objects(decoded.objects, truth);
}

std::string decoded_to_json(const DecodedScene& decoded);

}  // namespace scenevsa
