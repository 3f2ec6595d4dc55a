#pragma once

// Property checks shared by the unit suites and the acceptance binary. Each
// returns a list of human-readable violations; empty means the property held.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spellscan/corpus.hpp"
#include "spellscan/model/batch.hpp"
#include "spellscan/model/model.hpp"
#include "spellscan/random.hpp"
#include "spellscan/synthetic.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan::props {

using Violations = std::vector<std::string>;

// ---- finite differences ----------------------------------------------------

// Tensor family used to group samples.
inline std::string family(const std::string& name) {
  if (name.rfind("embeddings", 0) == 0) return "embeddings";
  if (name.find("norm") != std::string::npos) return "norm";
  if (name.find("attention.") != std::string::npos) return "attention";
  if (name.find("ffn.") != std::string::npos) return "ffn";
  return "head";
}

struct GradCheck {
  std::map<std::string, int> checked;
  double worst = 0;
  Violations failures;
};

// Central differences against the analytic gradient on sampled coordinates.
// The denominator floor absorbs rounding noise (about 1e-11) where the exact
// gradient is zero, e.g. key biases under softmax shift invariance.
inline void finite_difference(const model::Params& base, const model::ModelConfig& cfg, const model::HeadConfig& head,
                              const model::TrainingBatch& batch, GradCheck& out, std::uint64_t seed, int per_tensor,
                              double tolerance = 1e-4) {
  using model::batch_loss;
  model::Params grads = base.zeros_like();
  batch_loss<double>(base, cfg, head, batch, &grads, nullptr);
  model::Params probe = base;
  auto pv = probe.views();
  const auto gv = grads.views();
  Rng rng(seed);
  const double h = 1e-5;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    // The head not trained by this task has no path to the loss.
    const bool other_head = (head.task == Task::sequence && pv[k].name.rfind("token_head", 0) == 0) ||
                            (head.task == Task::token && pv[k].name.rfind("sequence_head", 0) == 0);
    if (other_head) continue;
    const auto n = static_cast<std::size_t>(pv[k].size());
    const int samples = family(pv[k].name) == "embeddings" ? 4 * per_tensor : per_tensor;
    for (int s = 0; s < samples; ++s) {
      const std::size_t i = n <= static_cast<std::size_t>(samples) ? static_cast<std::size_t>(s) : rng.below(n);
      if (i >= n) break;
      double& x = pv[k].data[i];
      const double keep = x;
      x = keep + h;
      const double up = batch_loss<double>(probe, cfg, head, batch, nullptr, nullptr);
      x = keep - h;
      const double down = batch_loss<double>(probe, cfg, head, batch, nullptr, nullptr);
      x = keep;
      const double numeric = (up - down) / (2 * h);
      const double analytic = gv[k].data[i];
      const double rel = std::abs(numeric - analytic) / std::max(std::abs(numeric) + std::abs(analytic), 1e-6);
      out.worst = std::max(out.worst, rel);
      if (!(rel < tolerance)) {
        std::ostringstream msg;
        msg << pv[k].name << "[" << i << "] analytic " << analytic << " numeric " << numeric;
        out.failures.push_back(msg.str());
      }
      ++out.checked[family(pv[k].name)];
    }
  }
}

// The fixed check on a 2-layer hidden-8 model: three poolings for the
// sequence task and one token-task batch.
inline GradCheck desk_gradient_check() {
  using namespace model;
  const Vocabulary vocab({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "he", "cast", "wing", "##ard", "##ium", "le", "##vio",
                          "##sa", "at", "the", "door", ".", "!", "quiet"});
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 8;
  cfg.heads = 2;
  cfg.ffn = 16;
  cfg.vocab_size = static_cast<int>(vocab.size());
  cfg.max_positions = 16;
  cfg.dropout = 0.0;
  const auto base = init_params<double>(cfg, 17, 0.5);
  std::vector<Encoding> encs = {encode_text("he cast wingardium leviosa at the door!", vocab, 14),
                                encode_text("quiet .", vocab, 14), encode_text("the door", vocab, 14)};
  GradCheck out;
  for (auto pooling : {Pooling::cls, Pooling::mean, Pooling::max}) {
    TrainingBatch b;
    for (const auto& e : encs) b.encodings.push_back(&e);
    b.sequence_labels = {1, 0, 0};
    finite_difference(base, cfg, HeadConfig{Task::sequence, pooling}, b, out, 100 + static_cast<int>(pooling), 12);
  }
  const std::vector<std::vector<Tag>> tags = {{Tag::O, Tag::O, Tag::B, Tag::I, Tag::O, Tag::O, Tag::O, Tag::O},
                                              {Tag::O, Tag::O},
                                              {Tag::O, Tag::B}};
  std::vector<std::vector<int>> labels;
  for (std::size_t i = 0; i < encs.size(); ++i) labels.push_back(piece_labels(encs[i], tags[i]));
  TrainingBatch b;
  for (std::size_t i = 0; i < encs.size(); ++i) {
    b.encodings.push_back(&encs[i]);
    b.token_labels.push_back(&labels[i]);
  }
  finite_difference(base, cfg, HeadConfig{Task::token, Pooling::cls}, b, out, 7, 40);
  return out;
}

// ---- segmentation -----------------------------------------------------------

inline std::string without_space(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\n' && c != '\t') out += c;
  }
  return out;
}

// Coverage, monotone counts and next-fit tightness for one document. The
// budget is raised to the longest paragraph when needed, since paragraph
// count bounds pack count only when every paragraph fits.
inline Violations segmentation_violations(const RawDocument& doc, const Vocabulary& vocab, int budget) {
  Violations v;
  const auto sentences = split_sentences(doc);
  const auto paragraphs = split_paragraphs(doc);
  const auto tokens = [&](std::string_view t) { return count_tokens(t, vocab); };
  for (const auto& p : paragraphs) budget = std::max(budget, static_cast<int>(tokens(p.text)));
  const auto packs = pack_sequences(sentences, budget, vocab);

  const std::string want = without_space(doc.text);
  for (const auto* segs : {&sentences, &paragraphs, &packs}) {
    std::string joined;
    for (const auto& s : *segs) joined += s.text;
    if (without_space(joined) != want) v.push_back(doc.doc_id + ": characters lost or reordered");
  }
  if (!(sentences.size() >= paragraphs.size() && paragraphs.size() >= packs.size())) {
    v.push_back(doc.doc_id + ": counts not monotone " + std::to_string(sentences.size()) + "/" +
                std::to_string(paragraphs.size()) + "/" + std::to_string(packs.size()));
  }

  std::vector<std::size_t> counts;
  for (const auto& s : sentences) counts.push_back(tokens(s.text));
  if (oracle::next_fit_pack_count({counts}, static_cast<std::size_t>(budget)) != packs.size()) {
    v.push_back(doc.doc_id + ": pack count differs from next-fit");
  }
  const auto b = static_cast<std::size_t>(budget);
  for (std::size_t i = 0; i < packs.size(); ++i) {
    std::size_t used = 0;
    for (int idx : packs[i].sentence_indices) used += counts[static_cast<std::size_t>(idx)];
    if (used > b && !packs[i].oversized) v.push_back(packs[i].seg_id + ": over budget");
    if (i + 1 < packs.size()) {
      const std::size_t next = counts[static_cast<std::size_t>(packs[i + 1].sentence_indices.front())];
      if (used + next <= b && !packs[i].oversized) v.push_back(packs[i].seg_id + ": next sentence would have fit");
    }
  }
  return v;
}

// Documents with varied shapes: `n` documents drawn from several generator
// settings.
inline std::vector<RawDocument> random_documents(int n, const SpellLexicon& lexicon, std::uint64_t seed) {
  std::vector<RawDocument> docs;
  Rng rng(seed);
  int round = 0;
  while (static_cast<int>(docs.size()) < n) {
    SyntheticConfig cfg;
    cfg.seed = rng.next();
    cfg.documents = 4;
    cfg.min_paragraphs = 1 + static_cast<int>(rng.below(3));
    cfg.max_paragraphs = cfg.min_paragraphs + static_cast<int>(rng.below(6));
    cfg.min_sentences = 1 + static_cast<int>(rng.below(2));
    cfg.max_sentences = cfg.min_sentences + static_cast<int>(rng.below(8));
    cfg.id_prefix = "r" + std::to_string(round++);
    for (auto& d : generate_documents(cfg, lexicon)) {
      if (static_cast<int>(docs.size()) < n) docs.push_back(std::move(d));
    }
  }
  return docs;
}

// ---- random strings -------------------------------------------------------

// Lowercase ASCII with occasional accented letters, length 1..14.
inline std::string random_word(Rng& rng) {
  static const std::vector<std::string> extra = {"é", "ü", "ñ", "ß"};
  std::string w;
  const int n = 1 + static_cast<int>(rng.below(14));
  for (int i = 0; i < n; ++i) {
    if (rng.uniform() < 0.03) {
      w += extra[rng.below(extra.size())];
    } else {
      w += static_cast<char>('a' + rng.below(26));
    }
  }
  return w;
}

// Text mixing lexicon phrases, filler words and punctuation, sometimes glued
// without a space so boundary rules get exercised.
inline std::string random_spell_text(Rng& rng, const SpellLexicon& lexicon) {
  static const std::vector<std::string> filler = {"the", "wand", "é", "—", "x", "spell", "charm", "patronuses", ".",
                                                  "!", "defensive", "spells", "'", "mortis", "locomotor", "hex"};
  const auto phrases = lexicon.phrases(MatchMode::combined);
  std::string text;
  const int n = 3 + static_cast<int>(rng.below(12));
  for (int k = 0; k < n; ++k) {
    const bool spell = rng.uniform() < 0.3;
    text += spell ? phrases[rng.below(phrases.size())].text : filler[rng.below(filler.size())];
    text += rng.uniform() < 0.8 ? " " : "";
  }
  return text;
}

}  // namespace spellscan::props
