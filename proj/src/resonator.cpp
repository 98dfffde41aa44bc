#include "scenevsa/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "scenevsa/seeding.hpp"

namespace scenevsa {

namespace {

bool same_estimates(const ResonatorState& a, const ResonatorState& b, Activation f) {
  for (int i = 0; i < kNumAttributes; ++i) {
    if (f == Activation::sign) {
      if (a.estimates[i] != b.estimates[i]) return false;
    } else if ((a.estimates[i] - b.estimates[i]).cwiseAbs().maxCoeff() > kNormalizedTolerance) {
      return false;
    }
  }
  return true;
}

// s unbound by every estimate except `skip`.
RealVector unbind_others(const RealVector& s, const ResonatorState& state, int skip) {
  RealVector u = s;
  for (int j = 0; j < kNumAttributes; ++j) {
    if (j != skip) u.array() *= state.estimates[j].array();
  }
  return u;
}

}  // namespace

void canonicalize_signs(ResonatorState& state, const CodebookSet& cbs, const RealVector& s) {
  std::array<RealVector, kNumAttributes> scores;
  int weakest = 0;
  double weakest_strength = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kNumAttributes; ++i) {
    RealVector& estimate = state.estimates[i];
    scores[i] = codeword_scores(cbs[kAttributes[i]], estimate);
    Eigen::Index strongest = 0;
    scores[i].cwiseAbs().maxCoeff(&strongest);
    if (scores[i][strongest] < 0.0) {
      estimate = -estimate;
      scores[i] = -scores[i];
    }
    const double norm = estimate.norm();
    const double strength = norm > 0.0 ? scores[i][strongest] / norm : 0.0;
    if (strength < weakest_strength) {
      weakest_strength = strength;
      weakest = i;
    }
  }
  RealVector product = state.estimates[0];
  for (int i = 1; i < kNumAttributes; ++i) product.array() *= state.estimates[i].array();
  if (s.dot(product) < 0.0) {
    state.estimates[weakest] = -state.estimates[weakest];
    scores[weakest] = -scores[weakest];
  }

  // A superposition can correlate more strongly (in magnitude) with a codeword
  // it does not contain, so the per-module rule may pick the wrong sign. Keep
  // whichever joint sign pattern reads out the object that best explains s.
  auto overlap = [&](unsigned mask) {
    std::array<int, kNumAttributes> idx{};
    for (int i = 0; i < kNumAttributes; ++i) {
      const RealVector signed_scores = (mask >> i) & 1u ? RealVector(-scores[i]) : scores[i];
      signed_scores.maxCoeff(&idx[i]);
    }
    return s.dot(encode_object(cbs, ObjectSpec::from_indices(idx)).cast<double>());
  };
  unsigned best_mask = 0;
  double best = overlap(0);
  for (unsigned mask = 1; mask < (1u << kNumAttributes); ++mask) {
    const double o = overlap(mask);
    if (o > best) {
      best = o;
      best_mask = mask;
    }
  }
  for (int i = 0; i < kNumAttributes; ++i) {
    if ((best_mask >> i) & 1u) state.estimates[i] = -state.estimates[i];
  }
}

ResonatorState init_state(const CodebookSet& cbs, const ResonatorConfig& cfg, Rng& rng) {
  ResonatorState state;
  for (Attribute a : kAttributes) {
    if (cfg.init_mode == InitMode::random_bipolar) {
      state[a] = random_bipolar(cbs.dim(), rng).cast<double>();
    } else {
      state[a] = sign(cbs[a].codewords().rowwise().sum()).cast<double>();
    }
    if (cfg.activation == Activation::normalization) state[a] = normalize(state[a]);
  }
  return state;
}

ResonatorState state_at(const CodebookSet& cbs, const ObjectSpec& obj) {
  validate(obj, cbs.sizes());
  ResonatorState state;
  for (Attribute a : kAttributes) state[a] = cbs[a].codewords_real().col(obj[a]);
  return state;
}

ResonatorState step(const RealVector& s, const ResonatorState& state, const CodebookSet& cbs,
                    const ResonatorConfig& cfg) {
  if (s.size() != cbs.dim()) throw std::invalid_argument("resonator step: dimension mismatch");
  ResonatorState next = state;
  // Synchronous updates read only time-t estimates; asynchronous updates read
  // the freshest value of each module in the order color, digit, ypos, xpos.
  const ResonatorState& source = state;
  for (int i = 0; i < kNumAttributes; ++i) {
    const RealVector u = unbind_others(s, cfg.synchronous ? source : next, i);
    next.estimates[i] = cleanup(cbs[kAttributes[i]], u, cfg.activation);
  }
  next.iteration = state.iteration + 1;
  next.converged = false;
  return next;
}

ObjectSpec read_out(const ResonatorState& state, const CodebookSet& cbs) {
  std::array<int, kNumAttributes> idx{};
  for (Attribute a : kAttributes) idx[static_cast<int>(a)] = argmax_readout(cbs[a], state[a]);
  return ObjectSpec::from_indices(idx);
}

IterationTrace trace_of(const ResonatorState& state, const CodebookSet& cbs) {
  IterationTrace t;
  t.iteration = state.iteration;
  for (Attribute a : kAttributes) {
    const double norm = state[a].norm();
    RealVector scores = codeword_scores(cbs[a], state[a]);
    if (norm > 0.0) scores /= norm * std::sqrt(static_cast<double>(cbs.dim()));
    t.scores[static_cast<int>(a)] = std::move(scores);
  }
  return t;
}

namespace {

std::uint64_t state_hash(const ResonatorState& state) {
  std::uint64_t h = 0;
  for (const RealVector& e : state.estimates) {
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      h = mix64(h ^ (e[i] > 0.0 ? 0x9bu : 0x35u) ^ static_cast<std::uint64_t>(i));
    }
  }
  return h;
}

ResonatorState random_restart(const CodebookSet& cbs, const ResonatorConfig& cfg, int iteration, Rng& rng) {
  ResonatorConfig random_cfg = cfg;
  random_cfg.init_mode = InitMode::random_bipolar;
  ResonatorState fresh = init_state(cbs, random_cfg, rng);
  fresh.iteration = iteration;
  return fresh;
}

// <s, compound of the read-out object> / N: about 1 when the readout is one
// of the objects in s, about 0 for a spurious attractor.
double readout_overlap(const RealVector& s, const ObjectSpec& obj, const CodebookSet& cbs) {
  return s.dot(encode_object(cbs, obj).cast<double>()) / static_cast<double>(cbs.dim());
}

ResonatorResult finish(ResonatorState state, const CodebookSet& cbs) {
  ResonatorResult result;
  result.estimate.object = read_out(state, cbs);
  result.estimate.iterations_used = state.iteration;
  result.estimate.converged = state.converged;
  result.state = std::move(state);
  return result;
}

ResonatorResult iterate(const RealVector& s, ResonatorState state, const CodebookSet& cbs,
                        const ResonatorConfig& cfg, Rng* rng, const TraceSink& trace) {
  cfg.validate();
  if (s.size() != cbs.dim()) throw std::invalid_argument("resonator run: dimension mismatch");
  // A zero input drives every module to the all-(+1) vector from any start,
  // so restarting could never leave that fixed point.
  const bool restarts = rng != nullptr && cfg.restart_spurious && cfg.activation == Activation::sign &&
                        !s.isZero(0.0);
  // States visited since the last (re)start, for exact cycle detection.
  std::vector<std::pair<std::uint64_t, ResonatorState>> visited;
  // Best rejected attractor so far, returned if the budget runs out.
  std::optional<std::pair<double, ResonatorState>> best;

  while (state.iteration < cfg.max_iterations) {
    ResonatorState next = step(s, state, cbs, cfg);
    canonicalize_signs(next, cbs, s);
    const bool fixed = same_estimates(state, next, cfg.activation);
    state = std::move(next);
    if (trace) trace(trace_of(state, cbs));
    if (!restarts) {
      if (fixed) {
        state.converged = true;
        break;
      }
      continue;
    }
    const std::uint64_t h = state_hash(state);
    const bool cycled = !fixed && std::any_of(visited.begin(), visited.end(), [&](const auto& v) {
      return v.first == h && same_estimates(v.second, state, cfg.activation);
    });
    if (!fixed && !cycled) {
      visited.emplace_back(h, state);
      continue;
    }
    const double overlap = readout_overlap(s, read_out(state, cbs), cbs);
    if (fixed && overlap >= cfg.min_overlap) {
      state.converged = true;
      break;
    }
    if (!best || overlap > best->first) best.emplace(overlap, state);
    if (state.iteration < cfg.max_iterations) {
      state = random_restart(cbs, cfg, state.iteration, *rng);
      ++state.restarts;
      visited.clear();
    }
  }

  if (!state.converged && best && best->first > readout_overlap(s, read_out(state, cbs), cbs)) {
    const int iterations = state.iteration;
    const int restarts_used = state.restarts;
    state = std::move(best->second);
    state.iteration = iterations;
    state.restarts = restarts_used;
  }
  return finish(std::move(state), cbs);
}

}  // namespace

ResonatorResult run_from(const RealVector& s, ResonatorState state, const CodebookSet& cbs,
                         const ResonatorConfig& cfg, const TraceSink& trace) {
  return iterate(s, std::move(state), cbs, cfg, nullptr, trace);
}

ResonatorResult run(const RealVector& s, const CodebookSet& cbs, const ResonatorConfig& cfg, Rng& rng,
                    const TraceSink& trace) {
  return iterate(s, init_state(cbs, cfg, rng), cbs, cfg, &rng, trace);
}

}  // namespace scenevsa
