#pragma once

#include "animgram/builtin_data.hpp"
#include "animgram/catalog.hpp"
#include "animgram/lexicon.hpp"

namespace animgram {

/// Catalog compiled into the library from data/catalog.json.
inline const Catalog& default_catalog() {
  static const Catalog catalog = Catalog::from_string(builtin::kCatalogJson);
  return catalog;
}

/// Lexicon compiled into the library from data/lexicon.json.
inline const Lexicon& default_lexicon() {
  static const Lexicon lexicon = Lexicon::from_string(builtin::kLexiconJson);
  return lexicon;
}

}  // namespace animgram
