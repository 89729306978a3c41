#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "animgram/dynamics.hpp"
#include "animgram/error.hpp"
#include "json.hpp"

namespace animgram {

enum class PartOfSpeech { kNoun, kVerb, kAdjective, kAdverb, kArticle, kFunction, kPunctuation };

constexpr std::string_view to_string(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::kNoun: return "noun";
    case PartOfSpeech::kVerb: return "verb";
    case PartOfSpeech::kAdjective: return "adj";
    case PartOfSpeech::kAdverb: return "adv";
    case PartOfSpeech::kArticle: return "det";
    case PartOfSpeech::kFunction: return "func";
    case PartOfSpeech::kPunctuation: return "punct";
  }
  return "?";
}

/// Only the four content classes can be tagged in lexicon data.
inline std::optional<PartOfSpeech> content_pos_from_string(std::string_view s) {
  if (s == "noun") return PartOfSpeech::kNoun;
  if (s == "verb") return PartOfSpeech::kVerb;
  if (s == "adj") return PartOfSpeech::kAdjective;
  if (s == "adv") return PartOfSpeech::kAdverb;
  return std::nullopt;
}

constexpr bool is_content(PartOfSpeech pos) {
  return pos == PartOfSpeech::kNoun || pos == PartOfSpeech::kVerb || pos == PartOfSpeech::kAdjective ||
         pos == PartOfSpeech::kAdverb;
}

enum class VerbForm { kBase, kThird, kIng, kPast, kParticiple };

constexpr std::string_view to_string(VerbForm f) {
  switch (f) {
    case VerbForm::kBase: return "base";
    case VerbForm::kThird: return "third";
    case VerbForm::kIng: return "ing";
    case VerbForm::kPast: return "past";
    case VerbForm::kParticiple: return "participle";
  }
  return "?";
}

inline std::optional<VerbForm> verb_form_from_string(std::string_view s) {
  for (VerbForm f : {VerbForm::kBase, VerbForm::kThird, VerbForm::kIng, VerbForm::kPast, VerbForm::kParticiple})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

struct VerbForms {
  std::string base, third, ing, past, participle;

  const std::string& get(VerbForm f) const {
    switch (f) {
      case VerbForm::kThird: return third;
      case VerbForm::kIng: return ing;
      case VerbForm::kPast: return past;
      case VerbForm::kParticiple: return participle;
      case VerbForm::kBase: break;
    }
    return base;
  }
};

/// One word of a caption. `lemma` is the dictionary form before any
/// synonym substitution; `text` is what gets rendered.
struct Token {
  std::string text;
  std::string lemma;
  PartOfSpeech pos = PartOfSpeech::kFunction;
  VerbForm form = VerbForm::kBase;
  friend bool operator==(const Token&, const Token&) = default;
};

/// Splits a phrase written as "on a rough/adj surface/noun". Tagged words
/// are content words; "a"/"an" become articles; anything else is a function
/// word. Underscores inside a word stand for spaces.
inline std::vector<Token> parse_phrase(std::string_view phrase) {
  std::vector<Token> out;
  std::istringstream in{std::string(phrase)};
  std::string piece;
  while (in >> piece) {
    Token t;
    const auto slash = piece.rfind('/');
    if (slash != std::string::npos) {
      auto pos = content_pos_from_string(std::string_view(piece).substr(slash + 1));
      if (!pos) throw DataError("unknown part of speech in phrase '" + std::string(phrase) + "'");
      t.pos = *pos;
      t.lemma = piece.substr(0, slash);
      for (char& c : t.lemma)
        if (c == '_') c = ' ';
    } else if (piece == "a" || piece == "an") {
      t.pos = PartOfSpeech::kArticle;
      t.lemma = "a";
    } else {
      t.pos = PartOfSpeech::kFunction;
      t.lemma = piece;
    }
    t.text = t.lemma;
    out.push_back(std::move(t));
  }
  return out;
}

/// Word data for caption realization: synonyms keyed by (lemma, part of
/// speech), verb morphology, and the phrase tables that map feature labels
/// to words.
class Lexicon {
 public:
  using PhraseTable = std::map<std::string, std::string>;  // label -> phrase

  static Lexicon from_json(const nlohmann::json& doc);
  static Lexicon from_string(std::string_view text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(std::string("lexicon is not valid JSON: ") + e.what());
    }
    return from_json(doc);
  }
  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open lexicon file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      return from_string(ss.str());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }

  const std::string& version() const { return version_; }

  const std::vector<std::string>& synonyms(const std::string& lemma, PartOfSpeech pos) const {
    static const std::vector<std::string> none;
    auto it = synonyms_.find({lemma, pos});
    return it == synonyms_.end() ? none : it->second;
  }
  bool has_word(const std::string& lemma, PartOfSpeech pos) const { return synonyms_.count({lemma, pos}) > 0; }
  const std::map<std::pair<std::string, PartOfSpeech>, std::vector<std::string>>& words() const {
    return synonyms_;
  }

  const VerbForms& verb(const std::string& lemma) const {
    auto it = verbs_.find(lemma);
    if (it == verbs_.end()) throw DataError("lexicon has no forms for verb '" + lemma + "'");
    return it->second;
  }

  const std::vector<std::string>& model_verbs(DynamicKind kind) const {
    auto it = model_verbs_.find(kind);
    if (it == model_verbs_.end()) throw DataError("lexicon has no verb for " + std::string(to_string(kind)));
    return it->second;
  }
  /// Model kind a verb lemma belongs to, counting synonyms.
  std::optional<DynamicKind> kind_of_verb(const std::string& lemma) const {
    auto it = verb_kind_.find(lemma);
    if (it == verb_kind_.end()) return std::nullopt;
    return it->second;
  }
  bool passive_only(DynamicKind kind) const { return passive_only_.count(kind) > 0; }

  /// Noun for a Shape feature: the label for primitives, the asset token
  /// for meshes.
  std::string shape_noun(const std::string& label, const std::string& token) const {
    auto it = shape_nouns_.find(label);
    if (it != shape_nouns_.end()) return it->second;
    std::string noun = token;
    for (char& c : noun)
      if (c == '_') c = ' ';
    if (!has_word(noun, PartOfSpeech::kNoun)) throw DataError("lexicon has no noun for shape '" + token + "'");
    return noun;
  }
  /// Every noun a scenario's subject can be named by, synonyms included.
  std::set<std::string> noun_variants(const std::string& noun) const {
    std::set<std::string> out{noun};
    for (const auto& s : synonyms(noun, PartOfSpeech::kNoun)) out.insert(s);
    return out;
  }

  const std::map<std::string, PhraseTable>& descriptors() const { return descriptors_; }
  const std::map<std::string, PhraseTable>& prepositions() const { return prepositions_; }
  const PhraseTable& position_complements() const { return position_complements_; }
  const PhraseTable& velocity_value_adverbs() const { return velocity_value_adverbs_; }
  const PhraseTable& velocity_direction_adverbs() const { return velocity_direction_adverbs_; }

  const std::string& relation_word(RelationKind kind) const {
    auto it = relation_words_.find(std::string(to_string(kind)));
    if (it == relation_words_.end()) throw DataError("lexicon has no relation word for " + std::string(to_string(kind)));
    return it->second;
  }

 private:
  std::string version_;
  std::map<std::pair<std::string, PartOfSpeech>, std::vector<std::string>> synonyms_;
  std::map<std::string, VerbForms> verbs_;
  std::map<DynamicKind, std::vector<std::string>> model_verbs_;
  std::map<std::string, DynamicKind> verb_kind_;
  std::set<DynamicKind> passive_only_;
  std::map<std::string, std::string> shape_nouns_;
  std::map<std::string, PhraseTable> descriptors_;
  std::map<std::string, PhraseTable> prepositions_;
  PhraseTable position_complements_;
  PhraseTable velocity_value_adverbs_;
  PhraseTable velocity_direction_adverbs_;
  std::map<std::string, std::string> relation_words_;

  void check_phrase(const std::string& phrase) const {
    for (const Token& t : parse_phrase(phrase))
      if (is_content(t.pos) && !has_word(t.lemma, t.pos))
        throw DataError("phrase '" + phrase + "' uses '" + t.lemma + "/" + std::string(to_string(t.pos)) +
                        "' which is not a lexicon word");
  }
};

namespace detail {

inline const nlohmann::json& lexicon_field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw DataError(std::string("lexicon is missing '") + key + "'");
  return obj.at(key);
}

inline Lexicon::PhraseTable phrase_table(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw DataError("lexicon table '" + where + "' must be an object");
  Lexicon::PhraseTable out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) throw DataError("lexicon table '" + where + "' holds a non-string phrase");
    out[it.key()] = it.value().get<std::string>();
  }
  return out;
}

}  // namespace detail

inline Lexicon Lexicon::from_json(const nlohmann::json& doc) {
  using detail::lexicon_field;
  Lexicon lx;
  try {
    lx.version_ = lexicon_field(doc, "lexicon_version").get<std::string>();

    for (const auto& w : lexicon_field(doc, "words")) {
      const auto lemma = lexicon_field(w, "lemma").get<std::string>();
      const auto pos_name = lexicon_field(w, "pos").get<std::string>();
      auto pos = content_pos_from_string(pos_name);
      if (!pos) throw DataError("word '" + lemma + "' has unknown part of speech '" + pos_name + "'");
      auto [it, fresh] = lx.synonyms_.try_emplace({lemma, *pos}, lexicon_field(w, "synonyms").get<std::vector<std::string>>());
      if (!fresh) throw DataError("word '" + lemma + "/" + pos_name + "' listed twice");
    }
    // A synonym that is itself a headword must carry the same part of speech
    // there, or substitution could change a word's grammatical role.
    for (const auto& [key, syns] : lx.synonyms_) {
      for (const auto& s : syns) {
        for (PartOfSpeech other : {PartOfSpeech::kNoun, PartOfSpeech::kVerb, PartOfSpeech::kAdjective,
                                   PartOfSpeech::kAdverb}) {
          if (other != key.second && lx.synonyms_.count({s, other}) && !lx.synonyms_.count({s, key.second}))
            throw DataError("synonym '" + s + "' of '" + key.first + "' is a " + std::string(to_string(other)) +
                            " elsewhere");
        }
      }
    }

    for (const auto& [lemma, forms] : lexicon_field(doc, "verb_forms").items()) {
      VerbForms v;
      v.base = lemma;
      v.third = lexicon_field(forms, "third").get<std::string>();
      v.ing = lexicon_field(forms, "ing").get<std::string>();
      v.past = lexicon_field(forms, "past").get<std::string>();
      v.participle = lexicon_field(forms, "participle").get<std::string>();
      lx.verbs_.emplace(lemma, std::move(v));
    }
    for (const auto& [key, syns] : lx.synonyms_) {
      if (key.second != PartOfSpeech::kVerb) continue;
      if (!lx.verbs_.count(key.first)) throw DataError("verb '" + key.first + "' has no forms");
      for (const auto& s : syns)
        if (!lx.verbs_.count(s)) throw DataError("verb synonym '" + s + "' has no forms");
    }

    for (const auto& [kind_name, lemmas] : lexicon_field(doc, "model_verbs").items()) {
      auto kind = dynamic_kind_from_string(kind_name);
      if (!kind) throw DataError("model_verbs names unknown model '" + kind_name + "'");
      auto list = lemmas.get<std::vector<std::string>>();
      if (list.empty()) throw DataError("model " + kind_name + " has no verbs");
      for (const auto& lemma : list) {
        if (!lx.has_word(lemma, PartOfSpeech::kVerb)) throw DataError("model verb '" + lemma + "' is not a verb word");
        std::vector<std::string> family{lemma};
        for (const auto& s : lx.synonyms(lemma, PartOfSpeech::kVerb)) family.push_back(s);
        for (const auto& v : family) {
          auto [it, fresh] = lx.verb_kind_.try_emplace(v, *kind);
          if (!fresh && it->second != *kind)
            throw DataError("verb '" + v + "' is shared by " + std::string(to_string(it->second)) + " and " +
                            kind_name);
        }
      }
      lx.model_verbs_[*kind] = std::move(list);
    }
    for (DynamicKind k : kAllDynamicKinds)
      if (!lx.model_verbs_.count(k)) throw DataError("model " + std::string(to_string(k)) + " has no verbs");

    for (const auto& name : lexicon_field(doc, "passive_only").get<std::vector<std::string>>()) {
      auto kind = dynamic_kind_from_string(name);
      if (!kind) throw DataError("passive_only names unknown model '" + name + "'");
      lx.passive_only_.insert(*kind);
    }

    for (const auto& [label, noun] : lexicon_field(doc, "shape_nouns").items()) {
      const auto n = noun.get<std::string>();
      if (!lx.has_word(n, PartOfSpeech::kNoun)) throw DataError("shape noun '" + n + "' is not a noun word");
      lx.shape_nouns_[label] = n;
    }

    for (const auto& [key, table] : lexicon_field(doc, "descriptors").items())
      lx.descriptors_[key] = detail::phrase_table(table, key);
    for (const auto& [key, table] : lexicon_field(doc, "prepositions").items())
      lx.prepositions_[key] = detail::phrase_table(table, key);
    lx.position_complements_ = detail::phrase_table(lexicon_field(doc, "position_complements"), "position_complements");
    lx.velocity_value_adverbs_ =
        detail::phrase_table(lexicon_field(doc, "velocity_value_adverbs"), "velocity_value_adverbs");
    lx.velocity_direction_adverbs_ =
        detail::phrase_table(lexicon_field(doc, "velocity_direction_adverbs"), "velocity_direction_adverbs");
    for (const auto& [kind, word] : lexicon_field(doc, "relation_words").items())
      lx.relation_words_[kind] = word.get<std::string>();

    for (const auto& [key, table] : lx.descriptors_)
      for (const auto& [label, phrase] : table) lx.check_phrase(phrase);
    for (const auto& [key, table] : lx.prepositions_)
      for (const auto& [label, phrase] : table) lx.check_phrase(phrase);
    for (const auto* table : {&lx.position_complements_, &lx.velocity_value_adverbs_, &lx.velocity_direction_adverbs_})
      for (const auto& [label, phrase] : *table) lx.check_phrase(phrase);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("lexicon has a malformed field: ") + e.what());
  }
  return lx;
}

}  // namespace animgram
