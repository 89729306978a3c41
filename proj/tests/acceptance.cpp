// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>

#include "support.hpp"

namespace ag = animgram;
namespace fs = std::filesystem;
using ag::testing::catalog;
using ag::testing::lexicon;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr int kCorpusSize = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Corpus {
  std::vector<ag::GenerationOutcome> outcomes;
  double seconds = 0.0;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < kCorpusSize; ++i)
      out.outcomes.push_back(ag::generate_scenario(kSeed, static_cast<std::uint64_t>(i), {}, catalog()));
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }();
  return c;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Outcome constraint_soundness() {
  const auto& c = corpus();
  std::size_t ok = 0, valid = 0;
  for (const auto& g : c.outcomes) {
    if (!g.ok) continue;
    ++ok;
    if (ag::validate(g.scenario, catalog()).ok()) ++valid;
  }
  const double error_rate = 1.0 - static_cast<double>(ok) / c.outcomes.size();
  return {ok > 0 && valid == ok && error_rate < 0.05 && c.seconds < 30.0,
          fmt("%.0f/%.0f generated scenarios valid", valid, ok) + fmt(", error rate %.2f%%", 100 * error_rate) +
              fmt(", %.2f s", c.seconds)};
}

Outcome criteria_immutability() {
  std::size_t checked = 0, identical = 0;
  for (const auto& g : corpus().outcomes) {
    if (g.criteria_before.empty() && g.criteria_after.empty()) continue;
    ++checked;
    if (g.criteria_before == g.criteria_after) ++identical;
  }
  return {checked > 0 && identical == checked, fmt("%.0f/%.0f scenarios with identical criteria values", identical, checked)};
}

Outcome determinism() {
  ag::testing::TempDir a("acc_det_1"), b("acc_det_1b"), c("acc_det_8");
  auto run = [](const fs::path& dir, int workers) {
    ag::RunConfig cfg;
    cfg.seed = kSeed;
    cfg.count = kCorpusSize;
    cfg.out_dir = dir;
    cfg.workers = workers;
    cfg.oracle = true;
    cfg.trace = false;
    cfg.caption_provenance = true;
    ag::generate_batch(cfg, catalog(), lexicon());
    return ag::testing::directory_bytes(dir);
  };
  const auto one = run(a.path(), 1);
  const auto again = run(b.path(), 1);
  const auto eight = run(c.path(), 8);
  const bool pass = !one.empty() && one == again && one == eight;
  return {pass, fmt("%.0f files; ", static_cast<double>(one.size())) +
                    "repeat run " + (one == again ? "identical" : "different") +
                    ", 8 workers " + (one == eight ? "identical" : "different")};
}

Outcome model_coverage() {
  const ag::DynamicsConfig cfg;
  int worst = 101;
  std::string worst_row;
  std::set<ag::DynamicKind> kinds;
  for (ag::DynamicKind kind : ag::kAllDynamicKinds) {
    for (ag::RelationKind rel : {ag::RelationKind::kNone, ag::RelationKind::kFrom, ag::RelationKind::kTo}) {
      int ok = 0;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ag::ParseTree t = ag::testing::sampled_tree(ag::derive_stream_seed(kSeed, seed), 3, 1);
        ag::Rng rng(seed);
        ag::DynamicModel m;
        if (!ag::testing::force_model(t, kind, rel, rng, m)) continue;
        try {
          const auto r = ag::apply_dynamic_model(t, m, catalog(), cfg, rng);
          if (!r.ok()) continue;
          for (const auto& c : m.constraints) ag::check_well_formed(c);
          if (ag::evaluate_all(t, m.constraints).all_satisfied()) ++ok;
        } catch (const ag::Error&) {
        }
      }
      if (ok >= 95) kinds.insert(kind);
      if (ok < worst) {
        worst = ok;
        worst_row = std::string(ag::to_string(kind)) + "/" + std::string(ag::to_string(rel));
      }
    }
  }
  return {worst >= 95 && kinds.size() == 7,
          "21 rows; worst " + worst_row + fmt(" at %.0f/100", worst)};
}

Outcome motion_semantics() {
  ag::OracleSettings settings;
  settings.dt = 1e-3;
  settings.steps = 1000;
  std::map<ag::DynamicKind, std::pair<int, int>> tally;  // held, checked
  for (int i = 0; i < 500; ++i) {
    const auto& g = corpus().outcomes[static_cast<std::size_t>(i)];
    if (!g.ok || !ag::validate(g.scenario, catalog()).ok()) continue;
    const auto v = ag::check_semantics(g.scenario.model, ag::simulate(g.scenario, catalog(), settings));
    auto& t = tally[g.scenario.model.kind];
    ++t.second;
    if (v.ok()) ++t.first;
  }
  bool pass = true;
  std::string detail;
  for (ag::DynamicKind k : ag::kAllDynamicKinds) {
    const auto [held, checked] = tally[k];
    const bool required = k == ag::DynamicKind::kJump || k == ag::DynamicKind::kDrop ||
                          k == ag::DynamicKind::kPush || k == ag::DynamicKind::kStrike;
    if (required && (checked == 0 || held != checked)) pass = false;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(ag::to_string(k)) +
              fmt(" %.0f/%.0f", held, checked);
  }
  return {pass, detail};
}

Outcome ballistic_accuracy() {
  const double y0 = 10.0, dt = 1e-3;
  const int steps = 1000;
  ag::BodyState b;
  b.position = {0.0, y0, 0.0};
  b.half_extents = {0.5, 0.5, 0.5};
  const auto trace = ag::simulate({b}, steps, dt);
  const double t = steps * dt;
  const double exact = y0 - 0.5 * 9.8 * t * t;
  const double got = trace.frames.back()[0].position.y;
  const double rel = std::abs(got - exact) / std::abs(exact);
  return {rel < 0.01, fmt("y(1 s) = %.6f, closed form %.6f, relative error %.3f%%", got, exact, 100 * rel)};
}

Outcome resampler_distribution() {
  const int n = 10000;
  const double bound = 3.0;
  ag::ParseTree base = ag::testing::sampled_tree(kSeed, 1, 0);
  const auto path = ag::velocity_value_path(base.targets()[0]);
  {
    ag::Feature* f = base.find(path);
    f->value = 12.0;
    f->label = ag::relabel_from_value(catalog().spec("Motion", "Velocity value"), f->value);
  }
  ag::Constraint c{ag::ConstraintKind::kLessEq, {path, bound}, {1}, 0.0, "basic"};
  std::vector<double> resampled;
  ag::Rng rng(kSeed);
  for (int i = 0; i < n; ++i) {
    ag::ParseTree t = base;
    if (!ag::resample_until_satisfied(t, {c}, catalog(), rng).ok()) return {false, "resampling failed"};
    resampled.push_back(std::get<double>(t.find(path)->value));
  }
  // Oracle: draw a sampleable label uniformly, a value uniformly inside its
  // bucket, and keep the draw only if the bound holds.
  const auto& spec = catalog().spec("Motion", "Velocity value");
  std::vector<std::pair<double, double>> buckets;
  for (const auto& l : spec.labels)
    if (l.sampleable) buckets.push_back({std::get<ag::ScalarBucket>(l.bucket).lo, std::get<ag::ScalarBucket>(l.bucket).hi});
  std::vector<double> oracle;
  ag::Rng orng(kSeed + 1);
  while (static_cast<int>(oracle.size()) < n) {
    const auto [lo, hi] = buckets[orng.below(buckets.size())];
    const double v = orng.uniform(lo, hi);
    if (v <= bound) oracle.push_back(v);
  }
  const double d = ag::testing::ks_statistic(resampled, oracle);
  const double crit = ag::testing::ks_critical(n, n, 1.628);
  return {d < crit, fmt("KS D = %.4f, critical %.4f (alpha 0.01, n = 10000)", d, crit)};
}

Outcome caption_properties() {
  ag::CaptionSettings settings;
  settings.per_scenario = 10;
  int scenarios = 0, bad_noun = 0, bad_verb = 0, overlap = 0, low_diversity = 0, numeric = 0;
  for (const auto& g : corpus().outcomes) {
    if (scenarios == 100) break;
    if (!g.ok) continue;
    ++scenarios;
    const auto& s = g.scenario;
    const std::string noun = ag::build_language_tree(s, lexicon()).clauses[0].subject.noun;
    const auto variants = lexicon().noun_variants(noun);
    std::set<std::string> distinct;
    for (const auto& cap : ag::caption_scenario(s, lexicon(), settings)) {
      distinct.insert(cap.text);
      bool has_noun = false;
      for (const auto& v : variants) has_noun = has_noun || cap.text.find(v) != std::string::npos;
      if (!has_noun) ++bad_noun;
      for (const auto& t : cap.tokens)
        if (t.pos == ag::PartOfSpeech::kVerb && lexicon().kind_of_verb(t.lemma) != s.model.kind) ++bad_verb;
      auto disjoint = [](const ag::NounPhrasePlan& np) {
        for (const auto& a : np.adjectives)
          if (std::find(np.clauses.begin(), np.clauses.end(), a) != np.clauses.end()) return false;
        return true;
      };
      for (const auto& cl : cap.provenance.plan.clauses) {
        if (!disjoint(cl.subject)) ++overlap;
        if (cl.objective && !disjoint(*cl.objective)) ++overlap;
        if (cl.relation_object && !disjoint(*cl.relation_object)) ++overlap;
      }
      for (char ch : cap.text)
        if (std::isdigit(static_cast<unsigned char>(ch))) {
          ++numeric;
          break;
        }
    }
    if (distinct.size() * 2 < 10) ++low_diversity;
  }

  // The reference noun phrase, reached through the descriptor sampler.
  ag::NounPhraseModel model;
  model.noun = lexicon().shape_noun("Cube", "Cube");
  for (const auto& [key, label] : std::vector<std::pair<std::string, std::string>>{{"Appearance/Color", "Blue"},
                                                                                  {"Appearance/Material", "Matte"},
                                                                                  {"Shape/Size", "Small"},
                                                                                  {"Physics/Material", "Elastic"},
                                                                                  {"Physics/Friction factor", "Rough"}})
    model.descriptors.push_back(lexicon().descriptors().at(key).at(label));
  const std::string target = "A blue and matte cube that is small, elastic and rough.";
  bool reached = false;
  for (std::uint64_t seed = 0; seed < 200000 && !reached; ++seed) {
    ag::Rng rng(seed);
    const auto plan = ag::detail::sample_noun_phrase(model, rng);
    reached = ag::render(ag::detail::noun_phrase_tokens(plan)) == target;
  }

  const bool pass = scenarios == 100 && bad_noun == 0 && bad_verb == 0 && overlap == 0 && low_diversity == 0 &&
                    numeric == 0 && reached;
  return {pass, fmt("%.0f scenarios; missing noun %.0f, wrong verb %.0f", scenarios, bad_noun, bad_verb) +
                    fmt(", overlapping descriptors %.0f, low diversity %.0f, numeric %.0f", overlap, low_diversity,
                        numeric) +
                    (reached ? ", reference phrase reached" : ", reference phrase NOT reached")};
}

Outcome round_trip() {
  std::size_t identical = 0;
  for (const auto& g : corpus().outcomes) {
    const std::string bytes = ag::serialize(g.scenario);
    try {
      const ag::Scenario back = ag::deserialize(bytes);
      if (back == g.scenario && ag::serialize(back) == bytes) ++identical;
    } catch (const ag::Error&) {
    }
  }
  int unexpected = 0;
  std::string first_unexpected;
  ag::Rng rng(kSeed);
  for (int i = 0; i < 10000; ++i) {
    const auto& g = corpus().outcomes[rng.below(corpus().outcomes.size())];
    std::string bytes = ag::serialize(g.scenario);
    switch (rng.below(3)) {
      case 0: bytes.resize(rng.below(bytes.size())); break;
      case 1:
        for (int k = 0; k < 4; ++k) bytes[rng.below(bytes.size())] = static_cast<char>(rng.between(0, 255));
        break;
      default: bytes.erase(rng.below(bytes.size()), 1 + rng.below(16)); break;
    }
    try {
      const ag::Scenario s = ag::deserialize(bytes);
      (void)ag::validate(s, catalog());
    } catch (const ag::DocumentError&) {
    } catch (const std::exception& e) {
      if (unexpected++ == 0) first_unexpected = e.what();
    } catch (...) {
      ++unexpected;
    }
  }
  return {identical == corpus().outcomes.size() && unexpected == 0,
          fmt("%.0f/%.0f identical round trips; %.0f unexpected failures in 10000 fuzz cases",
              static_cast<double>(identical), static_cast<double>(corpus().outcomes.size()), unexpected) +
              (first_unexpected.empty() ? "" : " (first: " + first_unexpected + ")")};
}

Outcome dependency_invariant() {
  double elastic_max = 0.0, rigid_min = std::numeric_limits<double>::infinity();
  std::size_t elastic = 0, rigid = 0;
  for (const auto& g : corpus().outcomes) {
    if (!g.ok) continue;
    for (ag::NodeId id : g.scenario.tree.objects()) {
      const auto& node = g.scenario.tree.node(id);
      const ag::Feature* mat = node.feature("Physics", "Material");
      const ag::Feature* ym = node.feature("Physics", "Young's Modulus");
      if (!mat || !ym) continue;
      const double v = std::get<double>(ym->value);
      if (mat->label == "Elastic") {
        ++elastic;
        elastic_max = std::max(elastic_max, v);
      } else if (mat->label == "Rigid") {
        ++rigid;
        rigid_min = std::min(rigid_min, v);
      }
    }
  }
  return {elastic > 0 && rigid > 0 && elastic_max < rigid_min,
          fmt("%.0f elastic (max %.3g Pa), ", static_cast<double>(elastic), elastic_max) +
              fmt("%.0f rigid (min %.3g Pa)", static_cast<double>(rigid), rigid_min)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"constraint soundness", constraint_soundness},
      {"criteria immutability", criteria_immutability},
      {"determinism", determinism},
      {"dynamic-model coverage", model_coverage},
      {"motion semantics", motion_semantics},
      {"ballistic oracle accuracy", ballistic_accuracy},
      {"resampler distribution", resampler_distribution},
      {"caption properties", caption_properties},
      {"round trip", round_trip},
      {"dependency invariant", dependency_invariant},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "AC" << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
