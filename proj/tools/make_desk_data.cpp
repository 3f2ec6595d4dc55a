// Regenerates the bundled desk-scale data under data/: the synthetic
// train/eval corpora, the frequency-built base vocabulary and the two
// reference wordlists used by the dictionary baseline.
#include <filesystem>
#include <iostream>
#include <map>
#include <unordered_set>

#include <CLI11.hpp>

#include "spellscan/corpus.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/spellbook.hpp"
#include "spellscan/synthetic.hpp"
#include "spellscan/text.hpp"
#include "spellscan/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace spellscan;

int main(int argc, char** argv) {
  CLI::App app{"Generate desk-scale data files"};
  fs::path data_dir = "data";
  std::uint64_t seed = 2024;
  std::size_t vocab_size = 8000;
  int train_docs = 24;
  int eval_docs = 8;
  app.add_option("--data-dir", data_dir, "Output data directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--vocab-size", vocab_size, "Target vocabulary size");
  app.add_option("--train-docs", train_docs);
  app.add_option("--eval-docs", eval_docs);
  CLI11_PARSE(app, argc, argv);

  try {
    const SpellLexicon synthetic = load_lexicon(data_dir / "synthetic_spells.jsonl");
    const SpellLexicon hp = load_lexicon(data_dir / "hp_spells.jsonl");

    std::map<std::string, std::size_t> counts;
    for (const auto& [split, docs, salt] :
         {std::tuple{"train", train_docs, 0ULL}, std::tuple{"eval", eval_docs, 1ULL}}) {
      SyntheticConfig cfg;
      cfg.seed = seed * 2 + salt;
      cfg.documents = docs;
      cfg.id_prefix = split;
      const fs::path dir = data_dir / "synthetic" / split;
      fs::create_directories(dir);
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt") fs::remove(entry.path());
      }
      for (const auto& d : generate_corpus(cfg, synthetic)) {
        write_file(dir / (d.name + ".txt"), d.raw);
        for (const auto& w : split_words(normalize_text(d.raw))) ++counts[w.text];
      }
    }
    // Common words also enter the vocabulary so it is not tied to one corpus.
    for (const auto& w : synthetic_common_words()) ++counts[w];

    // Incantation words never become whole pieces: spells start out
    // fragmented, which is what vocabulary extension repairs.
    std::unordered_set<std::string> excluded;
    for (const SpellLexicon* lex : {&synthetic, &hp}) {
      for (const auto& p : lex->phrases(MatchMode::incantations_only)) {
        for (const auto& w : split_words(p.text)) excluded.insert(w.text);
      }
    }
    const Vocabulary vocab = build_vocab_by_frequency(counts, vocab_size, excluded);
    save_vocab(vocab, data_dir / "desk_vocab.txt");

    std::string common;
    for (const auto& w : synthetic_common_words()) common += w + "\n";
    write_file(data_dir / "wordlist_common.txt", common);
    std::string names;
    for (const auto& n : synthetic_first_names()) names += to_lower(n) + "\n";
    for (const auto& n : synthetic_surnames()) names += to_lower(n) + "\n";
    write_file(data_dir / "character_names.txt", names);

    std::cout << "vocabulary: " << vocab.size() << " pieces\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
