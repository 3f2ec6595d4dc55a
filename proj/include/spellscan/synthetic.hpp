#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spellscan/corpus.hpp"
#include "spellscan/random.hpp"
#include "spellscan/spellbook.hpp"

namespace spellscan {

// Novel-like filler text with spell phrases planted at a controlled rate.
// Output is raw (capitalised, quoted dialogue, abbreviations, occasional CRLF)
// so it exercises ingest normalisation.
struct SyntheticConfig {
  std::uint64_t seed = 7;
  int documents = 4;
  int min_paragraphs = 3;
  int max_paragraphs = 8;
  int min_sentences = 2;  // per paragraph
  int max_sentences = 6;
  double spell_rate = 0.08;  // chance that a sentence carries a spell phrase
  double decoy_rate = 0.15;  // chance of a magic-sounding sentence without a spell
  double crlf_rate = 0.25;   // chance that a document uses \r\n line endings
  std::string id_prefix = "doc";
};

struct SyntheticDocument {
  std::string name;  // file stem
  std::string raw;
};

// Phrases are drawn from `lexicon` in combined mode.
std::vector<SyntheticDocument> generate_corpus(const SyntheticConfig& cfg, const SpellLexicon& lexicon);
std::vector<RawDocument> generate_documents(const SyntheticConfig& cfg, const SpellLexicon& lexicon);

// One raw sentence. `phrase` empty means a plain or decoy sentence.
std::string synthetic_sentence(Rng& rng, const Phrase* phrase, bool decoy);

// Character first names and surnames used by the generator.
const std::vector<std::string>& synthetic_first_names();
const std::vector<std::string>& synthetic_surnames();

// Every lowercase word the templates and slot fillers can produce, excluding
// character names and spell phrases: a reference list of "known" words.
std::vector<std::string> synthetic_common_words();

}  // namespace spellscan
