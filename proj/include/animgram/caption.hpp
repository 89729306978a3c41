#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <exception>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "animgram/dynamics.hpp"
#include "animgram/error.hpp"
#include "animgram/lexicon.hpp"
#include "animgram/rng.hpp"
#include "animgram/scenario.hpp"
#include "animgram/scene.hpp"
#include "json.hpp"

namespace animgram {

// ---------------------------------------------------------------------------
// Language tree

struct NounPhraseModel {
  NodeId node;
  std::string noun;
  std::vector<std::string> descriptors;  // lexicon phrases, attribute order
  std::vector<std::string> complements;  // from the initial position only
};

struct VerbPhraseModel {
  DynamicKind kind = DynamicKind::kJump;
  std::vector<std::string> verbs;        // lemma candidates
  bool passive_only = false;
  std::vector<std::string> auxiliaries;  // adverbs from velocity value, then direction
  std::optional<NounPhraseModel> objective;
  std::optional<std::string> relation_word;
  std::optional<NounPhraseModel> relation_object;
};

struct SubSentenceModel {
  NounPhraseModel subject;
  VerbPhraseModel verb;
};

struct LanguageTree {
  std::vector<SubSentenceModel> clauses;
  std::vector<std::string> prepositions;  // global pool from the environment and render nodes
};

namespace detail {

inline bool excluded_descriptor(std::string_view attribute, std::string_view feature) {
  return attribute == names::kMotion || feature == names::kYoungsModulus || feature == names::kPoissonRatio;
}

inline std::string label_phrase(const Lexicon::PhraseTable& table, const std::string& label) {
  auto it = table.find(label);
  return it == table.end() ? std::string() : it->second;
}

inline NounPhraseModel noun_phrase_model(const ParseTree& tree, NodeId id, const Lexicon& lexicon) {
  const SceneNode& node = tree.node(id);
  NounPhraseModel np;
  np.node = id;
  const Feature* shape = node.feature(names::kShape, names::kShapeFeature);
  if (!shape) throw Error("object " + std::to_string(id.value) + " has no shape feature");
  const auto* token = std::get_if<std::string>(&shape->value);
  np.noun = lexicon.shape_noun(shape->label, token ? *token : shape->label);

  for (const Attribute& a : node.attributes) {
    for (const Feature& f : a.features) {
      if (excluded_descriptor(a.name, f.name)) continue;
      auto table = lexicon.descriptors().find(Catalog::key(a.name, f.name));
      if (table == lexicon.descriptors().end()) continue;
      auto phrase = label_phrase(table->second, f.label);
      if (!phrase.empty()) np.descriptors.push_back(std::move(phrase));
    }
  }
  if (const Feature* p = node.feature(names::kMotion, names::kInitialPosition)) {
    auto phrase = label_phrase(lexicon.position_complements(), p->label);
    if (!phrase.empty()) np.complements.push_back(std::move(phrase));
  }
  return np;
}

}  // namespace detail

/// Routes scenario features to sentence components: shape to the head noun,
/// the dynamic model to the verb, velocity to verb adverbs, initial position
/// to a noun complement, and environment features to the preposition pool.
inline LanguageTree build_language_tree(const Scenario& scenario, const Lexicon& lexicon) {
  const ParseTree& tree = scenario.tree;
  const DynamicModel& m = scenario.model;
  LanguageTree lt;

  SubSentenceModel clause;
  clause.subject = detail::noun_phrase_model(tree, m.subject, lexicon);
  VerbPhraseModel& vp = clause.verb;
  vp.kind = m.kind;
  vp.verbs = lexicon.model_verbs(m.kind);
  vp.passive_only = lexicon.passive_only(m.kind);
  const SceneNode& subject = tree.node(m.subject);
  if (const Feature* f = subject.feature(names::kMotion, names::kVelocityValue)) {
    auto phrase = detail::label_phrase(lexicon.velocity_value_adverbs(), f->label);
    if (!phrase.empty()) vp.auxiliaries.push_back(std::move(phrase));
  }
  if (const Feature* f = subject.feature(names::kMotion, names::kVelocityDirection)) {
    auto phrase = detail::label_phrase(lexicon.velocity_direction_adverbs(), f->label);
    if (!phrase.empty()) vp.auxiliaries.push_back(std::move(phrase));
  }
  if (m.objective) vp.objective = detail::noun_phrase_model(tree, *m.objective, lexicon);
  if (m.relation.kind != RelationKind::kNone && m.relation.target) {
    vp.relation_word = lexicon.relation_word(m.relation.kind);
    vp.relation_object = detail::noun_phrase_model(tree, *m.relation.target, lexicon);
  }
  lt.clauses.push_back(std::move(clause));

  for (NodeKind kind : {NodeKind::kEnvironment, NodeKind::kRender}) {
    for (NodeId id : tree.ids_of(kind)) {
      for (const Attribute& a : tree.node(id).attributes) {
        for (const Feature& f : a.features) {
          auto table = lexicon.prepositions().find(Catalog::key(a.name, f.name));
          if (table == lexicon.prepositions().end()) continue;
          auto phrase = detail::label_phrase(table->second, f.label);
          if (!phrase.empty()) lt.prepositions.push_back(std::move(phrase));
        }
      }
    }
  }
  return lt;
}

// ---------------------------------------------------------------------------
// Sentence structure

/// Component orders. The OVS family puts the objective first and is realized
/// in the passive voice.
enum class SentenceStructure { kSVOP, kSVO, kPSVO, kOVSP, kOVS, kPOVS, kSVP, kSV, kPSV };

inline constexpr SentenceStructure kAllStructures[] = {
    SentenceStructure::kSVOP, SentenceStructure::kSVO, SentenceStructure::kPSVO,
    SentenceStructure::kOVSP, SentenceStructure::kOVS, SentenceStructure::kPOVS,
    SentenceStructure::kSVP,  SentenceStructure::kSV,  SentenceStructure::kPSV};

constexpr std::string_view to_string(SentenceStructure s) {
  switch (s) {
    case SentenceStructure::kSVOP: return "SVOP";
    case SentenceStructure::kSVO: return "SVO";
    case SentenceStructure::kPSVO: return "PSVO";
    case SentenceStructure::kOVSP: return "OVSP";
    case SentenceStructure::kOVS: return "OVS";
    case SentenceStructure::kPOVS: return "POVS";
    case SentenceStructure::kSVP: return "SVP";
    case SentenceStructure::kSV: return "SV";
    case SentenceStructure::kPSV: return "PSV";
  }
  return "?";
}

inline std::optional<SentenceStructure> structure_from_string(std::string_view s) {
  for (SentenceStructure k : kAllStructures)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr bool has_objective(SentenceStructure s) { return to_string(s).find('O') != std::string_view::npos; }
constexpr bool has_preposition(SentenceStructure s) { return to_string(s).find('P') != std::string_view::npos; }
constexpr bool leads_with_preposition(SentenceStructure s) { return to_string(s).front() == 'P'; }
constexpr bool is_passive_order(SentenceStructure s) {
  return s == SentenceStructure::kOVSP || s == SentenceStructure::kOVS || s == SentenceStructure::kPOVS;
}

struct StructureWeight {
  SentenceStructure structure;
  int weight;
};

inline constexpr StructureWeight kObjectiveStructureWeights[] = {
    {SentenceStructure::kSVOP, 4}, {SentenceStructure::kSVO, 2}, {SentenceStructure::kPSVO, 2},
    {SentenceStructure::kOVSP, 1}, {SentenceStructure::kOVS, 1}, {SentenceStructure::kPOVS, 1}};
inline constexpr StructureWeight kIntransitiveStructureWeights[] = {
    {SentenceStructure::kSVP, 4}, {SentenceStructure::kSV, 2}, {SentenceStructure::kPSV, 2}};

inline SentenceStructure sample_structure(const DynamicModel& model, Rng& rng) {
  auto pick = [&rng](const auto& table) {
    int total = 0;
    for (const auto& w : table) total += w.weight;
    auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
    for (const auto& w : table) {
      if (r < w.weight) return w.structure;
      r -= w.weight;
    }
    return table[0].structure;
  };
  return model.objective ? pick(kObjectiveStructureWeights) : pick(kIntransitiveStructureWeights);
}

// ---------------------------------------------------------------------------
// Realization plan and provenance

enum class Tense { kPresent, kProgressive, kPast };

constexpr std::string_view to_string(Tense t) {
  return t == Tense::kPresent ? "present" : t == Tense::kProgressive ? "progressive" : "past";
}
inline std::optional<Tense> tense_from_string(std::string_view s) {
  for (Tense t : {Tense::kPresent, Tense::kProgressive, Tense::kPast})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct NounPhrasePlan {
  std::string noun;
  std::vector<std::string> adjectives;  // before the noun
  std::vector<std::string> clauses;     // after "that is"
  std::optional<std::string> complement;
  friend bool operator==(const NounPhrasePlan&, const NounPhrasePlan&) = default;
};

struct ClausePlan {
  std::string verb;
  bool passive = false;
  NounPhrasePlan subject;
  std::optional<NounPhrasePlan> objective;
  std::vector<std::string> auxiliaries;
  std::optional<std::string> relation_word;
  std::optional<NounPhrasePlan> relation_object;
  friend bool operator==(const ClausePlan&, const ClausePlan&) = default;
};

/// Every random choice made while realizing one caption.
struct CaptionPlan {
  SentenceStructure structure = SentenceStructure::kSV;
  Tense tense = Tense::kPresent;
  std::vector<ClausePlan> clauses;
  std::vector<std::string> prepositions;
  friend bool operator==(const CaptionPlan&, const CaptionPlan&) = default;
};

struct Substitution {
  std::size_t token = 0;
  std::string from;
  std::string to;
  PartOfSpeech pos = PartOfSpeech::kNoun;
  friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct ParaphraseRecord {
  std::string provider;
  std::string pivot;
  bool failed = false;
  std::string error;
  std::string output;  // provider text; empty when failed
  friend bool operator==(const ParaphraseRecord&, const ParaphraseRecord&) = default;
};

struct CaptionProvenance {
  CaptionPlan plan;
  std::vector<Substitution> substitutions;
  std::optional<ParaphraseRecord> paraphrase;
  friend bool operator==(const CaptionProvenance&, const CaptionProvenance&) = default;
};

struct Caption {
  std::string text;
  std::vector<Token> tokens;
  CaptionProvenance provenance;
};

namespace detail {

inline Token word(std::string text, PartOfSpeech pos = PartOfSpeech::kFunction) {
  Token t;
  t.lemma = text;
  t.text = std::move(text);
  t.pos = pos;
  return t;
}

inline void append(std::vector<Token>& out, std::vector<Token> more) {
  for (auto& t : more) out.push_back(std::move(t));
}

/// "x", "x and y", "x, y and z".
inline void append_list(std::vector<Token>& out, const std::vector<std::string>& phrases) {
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i > 0) out.push_back(i + 1 == phrases.size() ? word("and") : word(",", PartOfSpeech::kPunctuation));
    append(out, parse_phrase(phrases[i]));
  }
}

inline std::vector<Token> noun_phrase_tokens(const NounPhrasePlan& np) {
  std::vector<Token> out{word("a", PartOfSpeech::kArticle)};
  append_list(out, np.adjectives);
  out.push_back(word(np.noun, PartOfSpeech::kNoun));
  if (np.complement) append(out, parse_phrase(*np.complement));
  if (!np.clauses.empty()) {
    out.push_back(word("that"));
    out.push_back(word("is"));
    append_list(out, np.clauses);
  }
  return out;
}

inline Token verb_token(const Lexicon& lexicon, const std::string& lemma, VerbForm form) {
  Token t;
  t.lemma = lemma;
  t.pos = PartOfSpeech::kVerb;
  t.form = form;
  t.text = lexicon.verb(lemma).get(form);
  return t;
}

inline std::vector<Token> verb_group_tokens(const Lexicon& lexicon, const std::string& lemma, Tense tense,
                                            bool passive) {
  std::vector<Token> out;
  if (passive) {
    if (tense == Tense::kPast) {
      out.push_back(word("was"));
    } else {
      out.push_back(word("is"));
      if (tense == Tense::kProgressive) out.push_back(word("being"));
    }
    out.push_back(verb_token(lexicon, lemma, VerbForm::kParticiple));
    return out;
  }
  switch (tense) {
    case Tense::kPresent: out.push_back(verb_token(lexicon, lemma, VerbForm::kThird)); break;
    case Tense::kProgressive:
      out.push_back(word("is"));
      out.push_back(verb_token(lexicon, lemma, VerbForm::kIng));
      break;
    case Tense::kPast: out.push_back(verb_token(lexicon, lemma, VerbForm::kPast)); break;
  }
  return out;
}

inline std::vector<Token> clause_tokens(const ClausePlan& c, Tense tense, const Lexicon& lexicon) {
  std::vector<Token> out;
  if (c.passive && c.objective) {
    append(out, noun_phrase_tokens(*c.objective));
    append(out, verb_group_tokens(lexicon, c.verb, tense, true));
    out.push_back(word("by"));
    append(out, noun_phrase_tokens(c.subject));
  } else {
    append(out, noun_phrase_tokens(c.subject));
    append(out, verb_group_tokens(lexicon, c.verb, tense, c.passive));
    if (c.objective) append(out, noun_phrase_tokens(*c.objective));
  }
  append_list(out, c.auxiliaries);
  if (c.relation_word && c.relation_object) {
    append(out, parse_phrase(*c.relation_word));
    append(out, noun_phrase_tokens(*c.relation_object));
  }
  return out;
}

inline std::vector<Token> preposition_tokens(const std::vector<std::string>& phrases) {
  std::vector<Token> out;
  for (const auto& p : phrases) append(out, parse_phrase(p));
  return out;
}

inline bool starts_with_vowel(const std::string& s) {
  if (s.empty()) return false;
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline NounPhrasePlan sample_noun_phrase(const NounPhraseModel& np, Rng& rng) {
  NounPhrasePlan plan;
  plan.noun = np.noun;
  std::vector<std::string> pool = np.descriptors;
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
  const auto n = static_cast<std::int64_t>(pool.size());
  const auto n_adj = rng.between(0, std::min<std::int64_t>(3, n));
  const auto n_clause = rng.between(0, std::min<std::int64_t>(3, n - n_adj));
  plan.adjectives.assign(pool.begin(), pool.begin() + n_adj);
  plan.clauses.assign(pool.begin() + n_adj, pool.begin() + n_adj + n_clause);
  if (!np.complements.empty() && rng.coin()) plan.complement = np.complements[rng.below(np.complements.size())];
  return plan;
}

}  // namespace detail

/// Token sequence a plan realizes to, before synonym substitution.
inline std::vector<Token> plan_tokens(const CaptionPlan& plan, const Lexicon& lexicon) {
  std::vector<Token> out;
  const bool lead = leads_with_preposition(plan.structure) && !plan.prepositions.empty();
  if (lead) {
    detail::append(out, detail::preposition_tokens(plan.prepositions));
    out.push_back(detail::word(",", PartOfSpeech::kPunctuation));
  }
  for (std::size_t i = 0; i < plan.clauses.size(); ++i) {
    if (i > 0) {
      out.push_back(detail::word(",", PartOfSpeech::kPunctuation));
      out.push_back(detail::word("and"));
    }
    detail::append(out, detail::clause_tokens(plan.clauses[i], plan.tense, lexicon));
  }
  if (!lead) detail::append(out, detail::preposition_tokens(plan.prepositions));
  return out;
}

/// Joins tokens into a sentence: articles agree with the next word,
/// punctuation attaches left, the first letter is capitalized and a period
/// closes the sentence.
inline std::string render(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    std::string text = t.text;
    if (t.pos == PartOfSpeech::kArticle) {
      const bool vowel = i + 1 < tokens.size() && detail::starts_with_vowel(tokens[i + 1].text);
      text = vowel ? "an" : "a";
    }
    if (!out.empty() && t.pos != PartOfSpeech::kPunctuation) out += ' ';
    out += text;
  }
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  out += '.';
  return out;
}

/// Samples tense, verb lemma, descriptor subsets, adverbs and prepositions
/// for `structure`, then renders the sentence.
inline Caption realize(const LanguageTree& tree, SentenceStructure structure, Rng& rng, const Lexicon& lexicon) {
  Caption cap;
  CaptionPlan& plan = cap.provenance.plan;
  plan.structure = structure;
  plan.tense = static_cast<Tense>(rng.below(3));
  for (const SubSentenceModel& sub : tree.clauses) {
    if (has_objective(structure) && !sub.verb.objective)
      throw Error("structure " + std::string(to_string(structure)) + " needs an objective");
    if (sub.verb.verbs.empty()) throw Error("verb phrase has no verb candidates");
    ClausePlan c;
    c.verb = sub.verb.verbs[rng.below(sub.verb.verbs.size())];
    c.passive = sub.verb.passive_only || is_passive_order(structure);
    c.subject = detail::sample_noun_phrase(sub.subject, rng);
    if (has_objective(structure)) c.objective = detail::sample_noun_phrase(*sub.verb.objective, rng);
    for (const auto& a : sub.verb.auxiliaries)
      if (rng.coin()) c.auxiliaries.push_back(a);
    if (sub.verb.relation_word && sub.verb.relation_object) {
      c.relation_word = sub.verb.relation_word;
      c.relation_object = detail::sample_noun_phrase(*sub.verb.relation_object, rng);
    }
    plan.clauses.push_back(std::move(c));
  }
  if (has_preposition(structure) && !tree.prepositions.empty()) {
    std::vector<std::string> pool = tree.prepositions;
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    const auto k = rng.between(1, std::min<std::int64_t>(2, static_cast<std::int64_t>(pool.size())));
    plan.prepositions.assign(pool.begin(), pool.begin() + k);
  }
  cap.tokens = plan_tokens(plan, lexicon);
  cap.text = render(cap.tokens);
  return cap;
}

namespace detail {

inline std::string substitute_text(const Token& t, const std::string& synonym, const Lexicon& lexicon) {
  return t.pos == PartOfSpeech::kVerb ? lexicon.verb(synonym).get(t.form) : synonym;
}

}  // namespace detail

/// Replaces each content word that has synonyms, independently with
/// probability `rate`, by a synonym of the same part of speech.
inline Caption apply_synonyms(Caption caption, const Lexicon& lexicon, Rng& rng, double rate) {
  for (std::size_t i = 0; i < caption.tokens.size(); ++i) {
    Token& t = caption.tokens[i];
    if (!is_content(t.pos)) continue;
    const auto& syns = lexicon.synonyms(t.lemma, t.pos);
    if (syns.empty() || !rng.coin(rate)) continue;
    const std::string& pick = syns[rng.below(syns.size())];
    Substitution s{i, t.text, detail::substitute_text(t, pick, lexicon), t.pos};
    t.text = s.to;
    caption.provenance.substitutions.push_back(std::move(s));
  }
  caption.text = render(caption.tokens);
  return caption;
}

/// Rebuilds a caption's text from its provenance alone.
inline std::string rederive_text(const CaptionProvenance& prov, const Lexicon& lexicon) {
  if (prov.paraphrase && !prov.paraphrase->failed) return prov.paraphrase->output;
  std::vector<Token> tokens = plan_tokens(prov.plan, lexicon);
  for (const Substitution& s : prov.substitutions) {
    if (s.token >= tokens.size() || tokens[s.token].text != s.from || tokens[s.token].pos != s.pos)
      throw Error("substitution at token " + std::to_string(s.token) + " does not match the plan");
    tokens[s.token].text = s.to;
  }
  return render(tokens);
}

// ---------------------------------------------------------------------------
// Paraphrase providers

/// Round-trip paraphraser: text in, text out through a pivot language.
/// Implementations must tolerate concurrent calls.
class ParaphraseProvider {
 public:
  virtual ~ParaphraseProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string round_trip(const std::string& text, const std::string& pivot) = 0;
  /// Cheap local providers run inline instead of on a watchdog thread.
  virtual bool inline_call() const { return false; }
};

class NullParaphraser : public ParaphraseProvider {
 public:
  std::string id() const override { return "null"; }
  std::string round_trip(const std::string& text, const std::string&) override { return text; }
  bool inline_call() const override { return true; }
};

/// Stub that uppercases its input; stands in for a real service in tests
/// and dry runs.
class UppercaseParaphraser : public ParaphraseProvider {
 public:
  std::string id() const override { return "mock"; }
  std::string round_trip(const std::string& text, const std::string&) override {
    std::string out = text;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  bool inline_call() const override { return true; }
};

inline const std::vector<std::string>& default_pivot_languages() {
  static const std::vector<std::string> pivots{"fr", "de", "zh"};
  return pivots;
}

/// Sends the caption through `provider`. A provider that throws, returns
/// nothing, or exceeds `timeout` leaves the text unchanged and marks the
/// record failed.
inline Caption paraphrase(Caption caption, const std::shared_ptr<ParaphraseProvider>& provider,
                          const std::string& pivot,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
  ParaphraseRecord rec;
  rec.provider = provider ? provider->id() : "null";
  rec.pivot = pivot;
  std::string result;
  try {
    if (!provider) {
      result = caption.text;
    } else if (provider->inline_call()) {
      result = provider->round_trip(caption.text, pivot);
    } else {
      auto promise = std::make_shared<std::promise<std::string>>();
      auto future = promise->get_future();
      // Detached so a hung provider cannot stall generation; the shared
      // state and provider outlive this call.
      std::thread([provider, promise, text = caption.text, pivot] {
        try {
          promise->set_value(provider->round_trip(text, pivot));
        } catch (...) {
          promise->set_exception(std::current_exception());
        }
      }).detach();
      if (future.wait_for(timeout) != std::future_status::ready) throw Error("paraphrase timed out");
      result = future.get();
    }
    if (result.empty()) throw Error("provider returned empty text");
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  if (!rec.failed) {
    rec.output = result;
    caption.text = std::move(result);
  }
  caption.provenance.paraphrase = std::move(rec);
  return caption;
}

// ---------------------------------------------------------------------------
// Batch helper

struct CaptionSettings {
  int per_scenario = 5;
  double synonym_rate = 0.3;
  std::shared_ptr<ParaphraseProvider> provider;  // null: no paraphrase step
  std::vector<std::string> pivots = default_pivot_languages();
  std::chrono::milliseconds timeout{5000};
};

/// Captions for one scenario from its own caption stream, so they do not
/// depend on how scene sampling consumed randomness.
inline std::vector<Caption> caption_scenario(const Scenario& scenario, const Lexicon& lexicon,
                                             const CaptionSettings& settings) {
  const LanguageTree tree = build_language_tree(scenario, lexicon);
  Rng rng = Rng::for_stream(scenario.master_seed, scenario.stream, StreamDomain::kCaptions);
  std::vector<Caption> out;
  for (int i = 0; i < settings.per_scenario; ++i) {
    const SentenceStructure s = sample_structure(scenario.model, rng);
    Caption c = apply_synonyms(realize(tree, s, rng, lexicon), lexicon, rng, settings.synonym_rate);
    if (settings.provider && !settings.pivots.empty()) {
      const std::string& pivot = settings.pivots[rng.below(settings.pivots.size())];
      c = paraphrase(std::move(c), settings.provider, pivot, settings.timeout);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Provenance JSON

inline nlohmann::json to_json(const NounPhrasePlan& np) {
  nlohmann::json j{{"noun", np.noun}, {"adjectives", np.adjectives}, {"clauses", np.clauses}};
  if (np.complement) j["complement"] = *np.complement;
  return j;
}

inline nlohmann::json to_json(const CaptionProvenance& prov) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const ClausePlan& c : prov.plan.clauses) {
    nlohmann::json j{{"verb", c.verb}, {"passive", c.passive}, {"subject", to_json(c.subject)},
                     {"auxiliaries", c.auxiliaries}};
    if (c.objective) j["objective"] = to_json(*c.objective);
    if (c.relation_word) j["relation_word"] = *c.relation_word;
    if (c.relation_object) j["relation_object"] = to_json(*c.relation_object);
    clauses.push_back(std::move(j));
  }
  nlohmann::json subs = nlohmann::json::array();
  for (const Substitution& s : prov.substitutions)
    subs.push_back({{"token", s.token}, {"from", s.from}, {"to", s.to}, {"pos", to_string(s.pos)}});
  nlohmann::json j{{"structure", to_string(prov.plan.structure)},
                   {"tense", to_string(prov.plan.tense)},
                   {"clauses", std::move(clauses)},
                   {"prepositions", prov.plan.prepositions},
                   {"substitutions", std::move(subs)}};
  if (prov.paraphrase) {
    const ParaphraseRecord& r = *prov.paraphrase;
    j["paraphrase"] = {{"provider", r.provider}, {"pivot", r.pivot}, {"failed", r.failed}};
    if (r.failed) j["paraphrase"]["error"] = r.error;
    else j["paraphrase"]["output"] = r.output;
  }
  return j;
}

namespace detail {

inline NounPhrasePlan noun_phrase_plan_from_json(const nlohmann::json& j) {
  NounPhrasePlan np;
  np.noun = j.at("noun").get<std::string>();
  np.adjectives = j.at("adjectives").get<std::vector<std::string>>();
  np.clauses = j.at("clauses").get<std::vector<std::string>>();
  if (j.contains("complement")) np.complement = j.at("complement").get<std::string>();
  return np;
}

}  // namespace detail

inline CaptionProvenance provenance_from_json(const nlohmann::json& j) {
  CaptionProvenance prov;
  try {
    auto structure = structure_from_string(j.at("structure").get<std::string>());
    auto tense = tense_from_string(j.at("tense").get<std::string>());
    if (!structure || !tense) throw Error("provenance has an unknown structure or tense");
    prov.plan.structure = *structure;
    prov.plan.tense = *tense;
    for (const auto& cj : j.at("clauses")) {
      ClausePlan c;
      c.verb = cj.at("verb").get<std::string>();
      c.passive = cj.at("passive").get<bool>();
      c.subject = detail::noun_phrase_plan_from_json(cj.at("subject"));
      c.auxiliaries = cj.at("auxiliaries").get<std::vector<std::string>>();
      if (cj.contains("objective")) c.objective = detail::noun_phrase_plan_from_json(cj.at("objective"));
      if (cj.contains("relation_word")) c.relation_word = cj.at("relation_word").get<std::string>();
      if (cj.contains("relation_object"))
        c.relation_object = detail::noun_phrase_plan_from_json(cj.at("relation_object"));
      prov.plan.clauses.push_back(std::move(c));
    }
    prov.plan.prepositions = j.at("prepositions").get<std::vector<std::string>>();
    for (const auto& sj : j.at("substitutions")) {
      Substitution s;
      s.token = sj.at("token").get<std::size_t>();
      s.from = sj.at("from").get<std::string>();
      s.to = sj.at("to").get<std::string>();
      auto pos = content_pos_from_string(sj.at("pos").get<std::string>());
      if (!pos) throw Error("substitution has a non-content part of speech");
      s.pos = *pos;
      prov.substitutions.push_back(std::move(s));
    }
    if (j.contains("paraphrase")) {
      const auto& pj = j.at("paraphrase");
      ParaphraseRecord r;
      r.provider = pj.at("provider").get<std::string>();
      r.pivot = pj.at("pivot").get<std::string>();
      r.failed = pj.at("failed").get<bool>();
      if (r.failed) r.error = pj.value("error", "");
      else r.output = pj.at("output").get<std::string>();
      prov.paraphrase = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed caption provenance: ") + e.what());
  }
  return prov;
}

}  // namespace animgram
