#pragma once

// Four-factor resonator network.
//
// Each module unbinds the scene vector with the other three modules' current
// estimates and cleans the result up against its own codebook:
//
//   c(t+1) = f(C C^T (s * d(t) * v(t) * h(t)))    and likewise for d, v, h.
//
// Iteration stops when all four estimates repeat exactly (or, under the
// normalization activation, to within kNormalizedTolerance), or when
// max_iterations is reached. After every step each estimate's sign is
// canonicalized against its codebook, and spurious attractors (limit cycles,
// fixed points that do not explain an object in s) trigger a random restart.

#include <array>
#include <functional>
#include <stdexcept>

#include "scenevsa/codebook.hpp"
#include "scenevsa/hypervector.hpp"
#include "scenevsa/scene.hpp"

namespace scenevsa {

enum class InitMode { random_bipolar, bundled_codewords };

struct ResonatorConfig {
  int max_iterations = 200;
  Activation activation = Activation::sign;
  InitMode init_mode = InitMode::random_bipolar;
  bool synchronous = true;
  /// Sign activation only: on a limit cycle (exact revisit of an earlier
  /// state) or a fixed point whose read-out object overlaps the input by less
  /// than min_overlap, draw a fresh random state and continue within the same
  /// iteration budget. If the budget runs out, the attractor with the largest
  /// overlap is read out (converged = false).
  bool restart_spurious = true;
  /// <s, compound(readout)> / N required to accept a fixed point. A true
  /// object contributes about 1, a spurious attractor about 0.
  double min_overlap = 0.5;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(min_overlap >= 0.0)) throw std::invalid_argument("min_overlap must be >= 0");
  }
};

/// Estimates are stored as doubles; under the sign activation every
/// component is exactly +1 or -1.
struct ResonatorState {
  std::array<RealVector, kNumAttributes> estimates;
  int iteration = 0;
  int restarts = 0;
  bool converged = false;

  RealVector& operator[](Attribute a) { return estimates[static_cast<int>(a)]; }
  const RealVector& operator[](Attribute a) const { return estimates[static_cast<int>(a)]; }
};

struct FactorEstimate {
  ObjectSpec object;
  int iterations_used = 0;
  bool converged = false;
};

/// Per-iteration cosine similarity of each module's estimate to every
/// codeword of its codebook.
struct IterationTrace {
  int iteration = 0;
  std::array<RealVector, kNumAttributes> scores;
};

using TraceSink = std::function<void(const IterationTrace&)>;

struct ResonatorResult {
  FactorEstimate estimate;
  ResonatorState state;
};

inline constexpr double kNormalizedTolerance = 1e-9;

ResonatorState init_state(const CodebookSet& cbs, const ResonatorConfig& cfg, Rng& rng);

/// State whose estimates are exactly the object's codewords.
ResonatorState state_at(const CodebookSet& cbs, const ObjectSpec& obj);

ResonatorState step(const RealVector& s, const ResonatorState& state, const CodebookSet& cbs,
                    const ResonatorConfig& cfg);

template <typename Derived>
ResonatorState step(const Eigen::MatrixBase<Derived>& s, const ResonatorState& state,
                    const CodebookSet& cbs, const ResonatorConfig& cfg) {
  return step(RealVector(s.template cast<double>()), state, cbs, cfg);
}

/// Sign gauge fixing. The update is equivariant under negating any estimate,
/// and an even number of negations leaves the bound product unchanged, so
/// solutions come in sign-flipped families. Each estimate is negated when its
/// strongest codeword correlation is negative; then, if the bound product of
/// all four estimates anti-correlates with s, the least decisive estimate
/// (typically a superposition) is negated back. Finally, of the 16 joint sign
/// patterns, the one whose argmax readout has the largest overlap with s is
/// kept (ties keep the current signs).
void canonicalize_signs(ResonatorState& state, const CodebookSet& cbs, const RealVector& s);

/// Argmax readout of every estimate against its codebook.
ObjectSpec read_out(const ResonatorState& state, const CodebookSet& cbs);

IterationTrace trace_of(const ResonatorState& state, const CodebookSet& cbs);

/// Runs from a fresh initial state drawn from `rng`.
ResonatorResult run(const RealVector& s, const CodebookSet& cbs, const ResonatorConfig& cfg, Rng& rng,
                    const TraceSink& trace = {});

/// Runs from a caller-supplied initial state. Without a random stream no
/// restarts are possible, so limit cycles run out the iteration budget.
ResonatorResult run_from(const RealVector& s, ResonatorState state, const CodebookSet& cbs,
                         const ResonatorConfig& cfg, const TraceSink& trace = {});

template <typename Derived>
ResonatorResult run(const Eigen::MatrixBase<Derived>& s, const CodebookSet& cbs,
                    const ResonatorConfig& cfg, Rng& rng, const TraceSink& trace = {}) {
  return run(RealVector(s.template cast<double>()), cbs, cfg, rng, trace);
}

}  // namespace scenevsa
