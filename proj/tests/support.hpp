#pragma once

#include <filesystem>
#include <string>

#include "spellscan/corpus.hpp"
#include "spellscan/spellbook.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan::testing {

inline std::filesystem::path data_dir() { return SPELLSCAN_DATA_DIR; }

// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(SPELLSCAN_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline const SpellLexicon& synthetic_lexicon() {
  static const SpellLexicon lex = load_lexicon(data_dir() / "synthetic_spells.jsonl");
  return lex;
}

inline const SpellLexicon& hp_lexicon() {
  static const SpellLexicon lex = load_lexicon(data_dir() / "hp_spells.jsonl");
  return lex;
}

inline const Vocabulary& desk_vocab() {
  static const Vocabulary vocab = load_vocab(data_dir() / "desk_vocab.txt");
  return vocab;
}

}  // namespace spellscan::testing
