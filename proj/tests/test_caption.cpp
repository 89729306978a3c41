#include <gtest/gtest.h>

#include <cctype>
#include <set>
#include <thread>

#include "support.hpp"

namespace ag = animgram;
using ag::SentenceStructure;
using ag::testing::catalog;
using ag::testing::lexicon;

namespace {

ag::CaptionPlan single_clause(ag::NounPhrasePlan subject, std::string verb = "jump") {
  ag::CaptionPlan plan;
  plan.structure = SentenceStructure::kSV;
  plan.tense = ag::Tense::kPresent;
  ag::ClausePlan c;
  c.verb = std::move(verb);
  c.subject = std::move(subject);
  plan.clauses.push_back(std::move(c));
  return plan;
}

std::string text_of(const ag::CaptionPlan& plan) { return ag::render(ag::plan_tokens(plan, lexicon())); }

std::vector<ag::Scenario> scenarios(std::uint64_t seed, int n) {
  std::vector<ag::Scenario> out;
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < n; ++i) {
    auto g = ag::generate_scenario(seed, i, {}, catalog());
    if (g.ok) out.push_back(std::move(g.scenario));
  }
  return out;
}

const std::vector<ag::Scenario>& corpus() {
  static const auto c = scenarios(42, 100);
  return c;
}

nlohmann::json lexicon_doc() { return nlohmann::json::parse(ag::builtin::kLexiconJson); }

class ThrowingParaphraser : public ag::ParaphraseProvider {
 public:
  std::string id() const override { return "throwing"; }
  std::string round_trip(const std::string&, const std::string&) override { throw std::runtime_error("service down"); }
};

class SlowParaphraser : public ag::ParaphraseProvider {
 public:
  std::string id() const override { return "slow"; }
  std::string round_trip(const std::string& text, const std::string&) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(500));
    return text;
  }
};

class EmptyParaphraser : public ag::ParaphraseProvider {
 public:
  std::string id() const override { return "empty"; }
  std::string round_trip(const std::string&, const std::string&) override { return {}; }
};

}  // namespace

TEST(CaptionRender, NounPhraseWithAdjectivesAndClauses) {
  ag::NounPhrasePlan np{"cube", {"blue/adj", "matte/adj"}, {"small/adj", "elastic/adj", "rough/adj"}, std::nullopt};
  EXPECT_EQ(text_of(single_clause(np)), "A blue and matte cube that is small, elastic and rough jumps.");
}

TEST(CaptionRender, BareNounPhrase) {
  EXPECT_EQ(text_of(single_clause({"cube", {}, {}, std::nullopt})), "A cube jumps.");
}

TEST(CaptionRender, ArticlesAgreeWithTheNextWord) {
  EXPECT_EQ(text_of(single_clause({"cube", {"elastic/adj"}, {}, std::nullopt})), "An elastic cube jumps.");
  EXPECT_EQ(text_of(single_clause({"orb", {}, {}, std::nullopt})), "An orb jumps.");
}

TEST(CaptionRender, TensesAndVoice) {
  auto plan = single_clause({"cube", {}, {}, std::nullopt}, "push");
  plan.clauses[0].objective = ag::NounPhrasePlan{"sphere", {}, {}, std::nullopt};
  plan.structure = SentenceStructure::kSVO;
  EXPECT_EQ(text_of(plan), "A cube pushes a sphere.");
  plan.tense = ag::Tense::kProgressive;
  EXPECT_EQ(text_of(plan), "A cube is pushing a sphere.");
  plan.tense = ag::Tense::kPast;
  EXPECT_EQ(text_of(plan), "A cube pushed a sphere.");
  plan.structure = SentenceStructure::kOVS;
  plan.clauses[0].passive = true;
  EXPECT_EQ(text_of(plan), "A sphere was pushed by a cube.");
  plan.tense = ag::Tense::kProgressive;
  EXPECT_EQ(text_of(plan), "A sphere is being pushed by a cube.");
}

TEST(CaptionRender, AgentlessPassiveAndExtras) {
  auto plan = single_clause({"cube", {}, {}, std::string("in the air")}, "throw");
  plan.clauses[0].passive = true;
  plan.clauses[0].auxiliaries = {"quickly/adv", "upward/adv"};
  plan.clauses[0].relation_word = "toward";
  plan.clauses[0].relation_object = ag::NounPhrasePlan{"sphere", {}, {}, std::nullopt};
  plan.structure = SentenceStructure::kPSV;
  plan.prepositions = {"in bright/adj light/noun"};
  EXPECT_EQ(text_of(plan), "In bright light, a cube in the air is thrown quickly and upward toward a sphere.");
}

TEST(CaptionStructure, ObjectiveOnlyWhenTheModelHasOne) {
  ag::Rng rng(3);
  ag::DynamicModel intransitive;
  intransitive.kind = ag::DynamicKind::kFly;
  ag::DynamicModel transitive;
  transitive.kind = ag::DynamicKind::kPush;
  transitive.objective = ag::NodeId{5};
  std::map<SentenceStructure, int> with, without;
  const int n = 18000;
  for (int i = 0; i < n; ++i) {
    ++without[ag::sample_structure(intransitive, rng)];
    ++with[ag::sample_structure(transitive, rng)];
  }
  for (const auto& [s, k] : without) EXPECT_FALSE(ag::has_objective(s)) << ag::to_string(s);
  for (const auto& [s, k] : with) EXPECT_TRUE(ag::has_objective(s)) << ag::to_string(s);
  // Chi-square against the weight tables; 0.999 quantiles are 13.8 (2 dof)
  // and 20.5 (5 dof).
  auto chi2 = [&](const std::map<SentenceStructure, int>& counts, const auto& table) {
    double total_w = 0.0, chi = 0.0;
    for (const auto& w : table) total_w += w.weight;
    for (const auto& w : table) {
      const double e = n * w.weight / total_w;
      const auto it = counts.find(w.structure);
      const double o = it == counts.end() ? 0.0 : it->second;
      chi += (o - e) * (o - e) / e;
    }
    return chi;
  };
  EXPECT_LT(chi2(without, ag::kIntransitiveStructureWeights), 13.8);
  EXPECT_LT(chi2(with, ag::kObjectiveStructureWeights), 20.5);
}

TEST(CaptionStructure, RealizeRefusesAnObjectiveItDoesNotHave) {
  const auto& s = corpus().front();
  ag::LanguageTree tree = ag::build_language_tree(s, lexicon());
  tree.clauses[0].verb.objective.reset();
  ag::Rng rng(1);
  EXPECT_THROW(ag::realize(tree, SentenceStructure::kSVO, rng, lexicon()), ag::Error);
}

TEST(CaptionStructure, NamesRoundTrip) {
  for (SentenceStructure s : ag::kAllStructures) EXPECT_EQ(ag::structure_from_string(ag::to_string(s)), s);
  EXPECT_EQ(ag::structure_from_string("VSO"), std::nullopt);
}

TEST(LanguageTree, DescriptorsSkipMotionAndElasticModuli) {
  for (const auto& s : corpus()) {
    const auto tree = ag::build_language_tree(s, lexicon());
    ASSERT_EQ(tree.clauses.size(), 1u);
    const auto& verb = tree.clauses[0].verb;
    EXPECT_EQ(verb.kind, s.model.kind);
    EXPECT_EQ(verb.objective.has_value(), s.model.objective.has_value());
    EXPECT_EQ(verb.relation_object.has_value(), s.model.relation.kind != ag::RelationKind::kNone);
    for (const auto& d : tree.clauses[0].subject.descriptors) {
      for (const auto* adverb : {"slowly", "steadily", "quickly", "upward", "downward"})
        EXPECT_EQ(d.find(adverb), std::string::npos) << d;
    }
    EXPECT_LE(tree.clauses[0].subject.descriptors.size(), 8u);
  }
}

TEST(Captions, EveryCaptionNamesItsKindAndHasNoDigits) {
  ag::CaptionSettings settings;
  settings.per_scenario = 10;
  for (const auto& s : corpus()) {
    for (const auto& c : ag::caption_scenario(s, lexicon(), settings)) {
      int verbs = 0;
      for (const auto& t : c.tokens) {
        if (t.pos != ag::PartOfSpeech::kVerb) continue;
        ++verbs;
        EXPECT_EQ(lexicon().kind_of_verb(t.lemma), s.model.kind) << c.text;
      }
      EXPECT_EQ(verbs, 1) << c.text;
      for (char ch : c.text) EXPECT_FALSE(std::isdigit(static_cast<unsigned char>(ch))) << c.text;
      if (s.model.kind == ag::DynamicKind::kThrow) EXPECT_EQ(c.text.find(" by "), std::string::npos) << c.text;
      const auto& plan = c.provenance.plan;
      EXPECT_EQ(ag::has_objective(plan.structure), s.model.objective.has_value());
      if (ag::is_passive_order(plan.structure)) EXPECT_NE(c.text.find(" by "), std::string::npos) << c.text;
      if (ag::has_preposition(plan.structure)) {
        EXPECT_GE(plan.prepositions.size(), 1u);
        EXPECT_LE(plan.prepositions.size(), 2u);
      } else {
        EXPECT_TRUE(plan.prepositions.empty());
      }
    }
  }
}

TEST(Captions, AtLeastHalfDistinctPerScenario) {
  ag::CaptionSettings settings;
  settings.per_scenario = 10;
  for (const auto& s : corpus()) {
    std::set<std::string> distinct;
    for (const auto& c : ag::caption_scenario(s, lexicon(), settings)) distinct.insert(c.text);
    EXPECT_GE(distinct.size(), 5u);
  }
}

TEST(Captions, DeterministicPerScenario) {
  ag::CaptionSettings settings;
  const auto a = ag::caption_scenario(corpus()[3], lexicon(), settings);
  const auto b = ag::caption_scenario(corpus()[3], lexicon(), settings);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].text, b[i].text);
}

TEST(Synonyms, RateZeroChangesNothing) {
  ag::Rng rng(4);
  const auto tree = ag::build_language_tree(corpus()[0], lexicon());
  for (int i = 0; i < 50; ++i) {
    const ag::Caption c = ag::realize(tree, ag::sample_structure(corpus()[0].model, rng), rng, lexicon());
    const ag::Caption same = ag::apply_synonyms(c, lexicon(), rng, 0.0);
    EXPECT_EQ(same.text, c.text);
    EXPECT_TRUE(same.provenance.substitutions.empty());
  }
}

TEST(Synonyms, RateOneReplacesEveryEligibleContentWord) {
  ag::Rng rng(5);
  for (const auto& s : corpus()) {
    const auto tree = ag::build_language_tree(s, lexicon());
    const ag::Caption c = ag::realize(tree, ag::sample_structure(s.model, rng), rng, lexicon());
    const ag::Caption sub = ag::apply_synonyms(c, lexicon(), rng, 1.0);
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < c.tokens.size(); ++i) {
      const auto& before = c.tokens[i];
      const auto& after = sub.tokens[i];
      EXPECT_EQ(before.pos, after.pos);
      EXPECT_EQ(before.lemma, after.lemma);
      EXPECT_EQ(before.form, after.form);
      if (!ag::is_content(before.pos) || lexicon().synonyms(before.lemma, before.pos).empty()) {
        EXPECT_EQ(before.text, after.text);
        continue;
      }
      ++eligible;
      EXPECT_NE(before.text, after.text);
    }
    ASSERT_EQ(sub.provenance.substitutions.size(), eligible);
    for (const auto& r : sub.provenance.substitutions) {
      const auto& syns = lexicon().synonyms(c.tokens[r.token].lemma, r.pos);
      if (r.pos == ag::PartOfSpeech::kVerb) {
        bool found = false;
        for (const auto& v : syns) found = found || lexicon().verb(v).get(c.tokens[r.token].form) == r.to;
        EXPECT_TRUE(found) << r.to;
      } else {
        EXPECT_NE(std::find(syns.begin(), syns.end(), r.to), syns.end()) << r.to;
      }
    }
  }
}

TEST(Provenance, RederivesTheExactText) {
  ag::CaptionSettings settings;
  settings.per_scenario = 10;
  settings.synonym_rate = 0.5;
  for (const auto& s : corpus())
    for (const auto& c : ag::caption_scenario(s, lexicon(), settings))
      EXPECT_EQ(ag::rederive_text(c.provenance, lexicon()), c.text);
}

TEST(Provenance, JsonRoundTrip) {
  ag::CaptionSettings settings;
  settings.synonym_rate = 0.5;
  settings.provider = std::make_shared<ag::UppercaseParaphraser>();
  for (const auto& s : corpus())
    for (const auto& c : ag::caption_scenario(s, lexicon(), settings)) {
      const auto back = ag::provenance_from_json(nlohmann::json::parse(ag::to_json(c.provenance).dump()));
      EXPECT_EQ(back, c.provenance);
      EXPECT_EQ(ag::rederive_text(back, lexicon()), c.text);
    }
}

TEST(Provenance, MismatchedSubstitutionIsRejected) {
  ag::Rng rng(6);
  const auto tree = ag::build_language_tree(corpus()[0], lexicon());
  ag::Caption c = ag::apply_synonyms(ag::realize(tree, SentenceStructure::kSV, rng, lexicon()), lexicon(), rng, 1.0);
  ASSERT_FALSE(c.provenance.substitutions.empty());
  c.provenance.substitutions[0].from = "zebra";
  EXPECT_THROW(ag::rederive_text(c.provenance, lexicon()), ag::Error);
}

TEST(Paraphrase, Providers) {
  ag::Rng rng(7);
  const auto tree = ag::build_language_tree(corpus()[0], lexicon());
  const ag::Caption base = ag::realize(tree, SentenceStructure::kSV, rng, lexicon());

  auto c = ag::paraphrase(base, std::make_shared<ag::NullParaphraser>(), "fr");
  EXPECT_EQ(c.text, base.text);
  ASSERT_TRUE(c.provenance.paraphrase.has_value());
  EXPECT_FALSE(c.provenance.paraphrase->failed);
  EXPECT_EQ(c.provenance.paraphrase->provider, "null");

  c = ag::paraphrase(base, std::make_shared<ag::UppercaseParaphraser>(), "de");
  std::string upper = base.text;
  for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  EXPECT_EQ(c.text, upper);
  EXPECT_EQ(c.provenance.paraphrase->pivot, "de");

  for (const std::shared_ptr<ag::ParaphraseProvider>& p :
       {std::shared_ptr<ag::ParaphraseProvider>(std::make_shared<ThrowingParaphraser>()),
        std::shared_ptr<ag::ParaphraseProvider>(std::make_shared<EmptyParaphraser>())}) {
    c = ag::paraphrase(base, p, "zh");
    EXPECT_EQ(c.text, base.text);
    EXPECT_TRUE(c.provenance.paraphrase->failed);
    EXPECT_FALSE(c.provenance.paraphrase->error.empty());
    EXPECT_EQ(ag::rederive_text(c.provenance, lexicon()), base.text);
  }
}

TEST(Paraphrase, TimeoutKeepsTheOriginalText) {
  ag::Rng rng(8);
  const auto tree = ag::build_language_tree(corpus()[0], lexicon());
  const ag::Caption base = ag::realize(tree, SentenceStructure::kSV, rng, lexicon());
  const auto start = std::chrono::steady_clock::now();
  const auto c = ag::paraphrase(base, std::make_shared<SlowParaphraser>(), "fr", std::chrono::milliseconds(50));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(400));
  EXPECT_EQ(c.text, base.text);
  EXPECT_TRUE(c.provenance.paraphrase->failed);
}

TEST(Lexicon, BuiltinIsConsistent) {
  for (ag::DynamicKind k : ag::kAllDynamicKinds) {
    ASSERT_FALSE(lexicon().model_verbs(k).empty());
    for (const auto& v : lexicon().model_verbs(k)) {
      EXPECT_EQ(lexicon().kind_of_verb(v), k);
      for (const auto& syn : lexicon().synonyms(v, ag::PartOfSpeech::kVerb)) EXPECT_EQ(lexicon().kind_of_verb(syn), k);
    }
  }
  EXPECT_TRUE(lexicon().passive_only(ag::DynamicKind::kThrow));
  EXPECT_EQ(lexicon().shape_noun("Mesh", "flying_saucer"), "flying saucer");
  EXPECT_EQ(lexicon().relation_word(ag::RelationKind::kTo), "toward");
}

TEST(Lexicon, PhraseNotation) {
  const auto tokens = ag::parse_phrase("on an extremely/adv rough/adj surface/noun");
  ASSERT_EQ(tokens.size(), 5u);
  EXPECT_EQ(tokens[0].pos, ag::PartOfSpeech::kFunction);
  EXPECT_EQ(tokens[1].pos, ag::PartOfSpeech::kArticle);
  EXPECT_EQ(tokens[2].pos, ag::PartOfSpeech::kAdverb);
  EXPECT_EQ(tokens[3].text, "rough");
  EXPECT_EQ(tokens[4].pos, ag::PartOfSpeech::kNoun);
  EXPECT_EQ(ag::parse_phrase("flying_saucer/noun")[0].text, "flying saucer");
}

TEST(Lexicon, MalformedDataIsRejected) {
  EXPECT_THROW(ag::Lexicon::from_string("{"), ag::DataError);
  EXPECT_THROW(ag::Lexicon::load("/nonexistent/lexicon.json"), ag::DataError);

  auto doc = lexicon_doc();
  doc["words"].push_back(doc["words"][0]);
  EXPECT_THROW(ag::Lexicon::from_json(doc), ag::DataError);

  doc = lexicon_doc();
  doc["verb_forms"].erase("leap");
  EXPECT_THROW(ag::Lexicon::from_json(doc), ag::DataError);

  doc = lexicon_doc();
  doc["model_verbs"]["FLY"] = nlohmann::json::array({"jump"});
  EXPECT_THROW(ag::Lexicon::from_json(doc), ag::DataError);

  doc = lexicon_doc();
  doc["velocity_value_adverbs"]["Fast"] = "zoomily/adv";
  EXPECT_THROW(ag::Lexicon::from_json(doc), ag::DataError);

  doc = lexicon_doc();
  doc["model_verbs"].erase("STRIKE");
  EXPECT_THROW(ag::Lexicon::from_json(doc), ag::DataError);
}
