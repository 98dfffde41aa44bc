#include "scenevsa/decoder.hpp"

#include "json.hpp"

namespace scenevsa {

std::string_view to_string(HaltReason h) {
  return h == HaltReason::max_runs ? "max-runs" : "energy-threshold";
}

DecodedScene decode_scene(const RealVector& s, const CodebookSet& cbs, const ResonatorConfig& cfg,
                          int max_runs, double energy_threshold, Rng& rng, const TraceSink& trace) {
  if (max_runs < 1) throw std::invalid_argument("decode_scene: max_runs must be >= 1");
  if (!(energy_threshold >= 0.0)) throw std::invalid_argument("decode_scene: energy_threshold must be >= 0");
  DecodedScene out;
  RealVector residual = s;
  while (out.runs_executed < max_runs) {
    ResonatorResult r = run(residual, cbs, cfg, rng, trace);
    residual = explain_away(residual, r.estimate, cbs);
    out.objects.push_back(r.estimate);
    out.residual_energy_trace.push_back(residual.squaredNorm());
    ++out.runs_executed;
    if (out.residual_energy_trace.back() < energy_threshold) {
      out.halted_by = HaltReason::energy_threshold;
      return out;
    }
  }
  out.halted_by = HaltReason::max_runs;
  return out;
}

MatchResult match_objects(const std::vector<FactorEstimate>& decoded, const SceneDescription& truth) {
  MatchResult m;
  m.decoded_correct.assign(decoded.size(), false);
  m.truth_hit.assign(truth.objects.size(), false);
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    for (std::size_t j = 0; j < truth.objects.size(); ++j) {
      if (!m.truth_hit[j] && decoded[i].object == truth.objects[j]) {
        m.truth_hit[j] = true;
        m.decoded_correct[i] = true;
        ++m.correct;
        break;
      }
    }
  }
  return m;
}

std::string decoded_to_json(const DecodedScene& decoded) {
  nlohmann::json objs = nlohmann::json::array();
  for (const FactorEstimate& e : decoded.objects) {
    objs.push_back({{"color", e.object.color},
                    {"digit", e.object.digit},
                    {"ypos", e.object.ypos},
                    {"xpos", e.object.xpos},
                    {"iterations", e.iterations_used},
                    {"converged", e.converged}});
  }
  nlohmann::json j{{"objects", objs},
                   {"residual_energy_trace", decoded.residual_energy_trace},
                   {"runs_executed", decoded.runs_executed},
                   {"halted_by", std::string(to_string(decoded.halted_by))}};
  return j.dump();
}

}  // namespace scenevsa
