#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "animgram/catalog.hpp"
#include "animgram/constraint.hpp"
#include "animgram/dynamics.hpp"
#include "animgram/grammar.hpp"
#include "animgram/resampler.hpp"
#include "animgram/rng.hpp"
#include "animgram/scene.hpp"
#include "json.hpp"

namespace animgram {

inline constexpr const char* kSchemaVersion = "1.0";

/// Knobs recorded inside every scenario document.
struct GenerationSettings {
  GrammarLimits limits;
  DynamicsConfig dynamics;
  int max_iter = 1000;
  friend bool operator==(const GenerationSettings&, const GenerationSettings&) = default;
};

struct Scenario {
  std::string schema_version = kSchemaVersion;
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
  GenerationSettings settings;
  ParseTree tree;
  DynamicModel model;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline nlohmann::json feature_value_to_json(const FeatureValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const Vec3* p = std::get_if<Vec3>(&v)) return nlohmann::json::array({p->x, p->y, p->z});
  return std::get<std::string>(v);
}

/// Canonical text of every criteria operand's current value, in
/// constraint order.
inline std::vector<std::string> criteria_values(const ParseTree& tree, const std::vector<Constraint>& constraints) {
  std::vector<std::string> out;
  for (const auto& c : constraints)
    for (std::size_t i : c.criteria) out.push_back(feature_value_to_json(resolve_operand(tree, c.operands[i])).dump());
  return out;
}

struct GenerationOutcome {
  bool ok = false;
  Scenario scenario;
  ResampleResult resample;
  std::string error;
  std::vector<std::string> criteria_before;  // captured as each stage starts resampling
  std::vector<std::string> criteria_after;   // same operands, read from the final tree
};

namespace detail {

struct CriteriaRecorder : StageObserver {
  std::vector<Constraint> seen;
  std::vector<std::string> values;
  void before_resample(const ParseTree& tree, const std::vector<Constraint>& constraints) override {
    auto v = criteria_values(tree, constraints);
    values.insert(values.end(), v.begin(), v.end());
    seen.insert(seen.end(), constraints.begin(), constraints.end());
  }
};

}  // namespace detail

/// One scenario from its own random stream: parse tree, features, dynamic
/// model, constraints, resampling. Failures are reported, never retried.
inline GenerationOutcome generate_scenario(std::uint64_t master_seed, std::uint64_t stream,
                                           const GenerationSettings& settings, const Catalog& catalog) {
  GenerationOutcome out;
  Scenario& s = out.scenario;
  s.master_seed = master_seed;
  s.stream = stream;
  s.settings = settings;
  try {
    Rng rng = Rng::for_stream(master_seed, stream, StreamDomain::kScene);
    s.tree = expand_scene(rng, settings.limits, derive_stream_seed(master_seed, stream, StreamDomain::kScene));
    sample_features(s.tree, catalog, rng);
    s.model = sample_dynamic_model(s.tree, rng);
    attach_relation(s.model, s.tree, settings.dynamics, rng);
    detail::CriteriaRecorder recorder;
    out.resample = apply_dynamic_model(s.tree, s.model, catalog, settings.dynamics, rng, settings.max_iter, &recorder);
    out.criteria_before = std::move(recorder.values);
    out.criteria_after = criteria_values(s.tree, recorder.seen);
    out.ok = out.resample.ok();
    if (!out.ok) out.error = std::string(to_string(out.resample.status)) + ": " + out.resample.message;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace animgram
