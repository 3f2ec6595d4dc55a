// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "properties.hpp"
#include "spellscan/cli.hpp"
#include "spellscan/dataset.hpp"
#include "spellscan/eval.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/model/model.hpp"
#include "spellscan/spellbook.hpp"
#include "support.hpp"

using namespace spellscan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::vector<Segment> sentences_of(const std::vector<RawDocument>& docs) {
  std::vector<Segment> out;
  for (const auto& d : docs) {
    auto s = split_sentences(d);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

// ---- 1 ---------------------------------------------------------------------

void metric_oracle(Outcome& o) {
  struct Row {
    const char* name;
    std::int64_t tp, fn, fp, tn;
    double printed;
  };
  const std::vector<Row> rows = {
      {"sentence full", 279, 5, 78, 13880, 0.8705}, {"sentence inc", 112, 0, 67, 14063, 0.7698}, {"sentence ext full", 278, 6, 75, 13883, 0.8728},
      {"sentence ext inc", 111, 1, 42, 14088, 0.8377}, {"paragraph full", 262, 9, 43, 6597, 0.9097},  {"paragraph inc", 106, 2, 23, 6780, 0.8945},
      {"sequence full", 197, 7, 11, 587, 0.9563},   {"sequence inc", 77, 7, 5, 716, 0.9277},     {"sequence ext full", 195, 9, 9, 589, 0.9559},
      {"sequence ext inc", 80, 3, 2, 717, 0.9697},     {"token full", 274, 10, 129, 13829, 0.7977}, {"token inc", 110, 2, 103, 14027, 0.6769},
      {"token ext full", 54, 230, 57, 13901, 0.2880}, {"token ext inc", 28, 84, 43, 14087, 0.3060},
  };
  int ok = 0;
  for (const auto& r : rows) {
    const double f1 = f1_from_matrix(ConfusionMatrix{r.tp, r.fp, r.fn, r.tn}).f1;
    const bool within = std::abs(f1 - r.printed) <= 0.0005;
    ok += within;
    std::ostringstream msg;
    msg << r.name << " gives " << format_metric(f1) << " vs printed " << std::fixed << std::setprecision(4)
        << r.printed;
    o.require(within, msg.str());
  }
  o.detail << (o.pass ? "" : "; ") << ok << "/" << rows.size() << " matrices within 0.0005";
}

// ---- 2 ---------------------------------------------------------------------

void size_law(Outcome& o) {
  const auto& lex = testing::synthetic_lexicon();
  int corpora = 0;
  for (std::uint64_t seed : {3u, 11u, 29u, 57u}) {
    SyntheticConfig sc;
    sc.seed = seed;
    sc.documents = 6;
    sc.spell_rate = 0.05;
    const auto segs = sentences_of(generate_documents(sc, lex));
    std::size_t p = 0;
    for (const auto& s : segs) p += label_segment(s, lex, MatchMode::combined).positive;
    if (p == 0 || segs.size() - p < 10 * p) continue;
    ++corpora;
    const auto ds = build_sequence_dataset(segs, lex, BuildConfig{});
    o.require(ds.train.size() + ds.dev.size() == 11 * p,
              "seed " + std::to_string(seed) + ": " + std::to_string(ds.train.size() + ds.dev.size()) +
                  " examples for P=" + std::to_string(p));
  }
  o.require(corpora >= 3, "too few corpora met the negative supply precondition");
  o.require(283 * 11 == 3113 && 773 * 11 == 8503, "quoted totals");
  o.detail << (o.pass ? "" : "; ") << corpora << " corpora, 283->3113 and 773->8503";
}

// ---- 3 ---------------------------------------------------------------------

void gradient_check(Outcome& o) {
  const auto g = props::desk_gradient_check();
  for (const auto& f : g.failures) o.require(false, f);
  for (const auto& [fam, n] : g.checked) {
    if (fam != "head") o.require(n >= 200, fam + " has only " + std::to_string(n) + " samples");
  }
  o.detail << (o.pass ? "" : "; ") << "worst relative error " << std::scientific << std::setprecision(2) << g.worst;
  for (const auto& [fam, n] : g.checked) o.detail << ", " << fam << " " << n;
}

// Five or ten positives and the rest negatives, drawn from one built set.
template <typename Example, typename IsPositive>
std::vector<Example> fifty(const std::vector<Example>& pool, std::size_t positives, IsPositive is_positive) {
  std::vector<Example> out;
  for (const auto& e : pool) {
    if (is_positive(e) && out.size() < positives) out.push_back(e);
  }
  for (const auto& e : pool) {
    if (!is_positive(e) && out.size() < 50) out.push_back(e);
  }
  return out;
}

void overfit(Outcome& o) {
  using namespace model;
  const auto& vocab = testing::desk_vocab();
  const auto& lex = testing::synthetic_lexicon();
  SyntheticConfig sc;
  sc.documents = 6;
  sc.seed = 21;
  const auto segs = sentences_of(generate_documents(sc, lex));
  BuildConfig bc;
  bc.neg_ratio = 9;
  bc.dev_fraction = 0.0;
  ModelConfig cfg;
  cfg.vocab_size = static_cast<int>(vocab.size());
  TrainConfig t;
  t.epochs = 30;
  t.max_len = 64;

  const auto seq = fifty(build_sequence_dataset(segs, lex, bc).train, 5,
                         [](const SeqExample& e) { return e.label == Label::positive; });
  o.require(seq.size() == 50, "sequence set has " + std::to_string(seq.size()) + " examples");
  const auto rs = train_sequence(init_params<double>(cfg, 42), cfg, Pooling::cls, vocab, seq, seq, t);
  double best_seq = 0;
  for (const auto& m : rs.trace) best_seq = std::max(best_seq, m.dev_f1.value_or(0));

  const auto tok = fifty(build_token_dataset(segs, lex, bc).train, 10, [](const TokExample& e) {
    return std::any_of(e.tags.begin(), e.tags.end(), [](Tag x) { return x != Tag::O; });
  });
  o.require(tok.size() == 50, "token set has " + std::to_string(tok.size()) + " examples");
  const auto rt = train_tokens(init_params<double>(cfg, 42), cfg, vocab, tok, tok, t);
  double best_tok = 0;
  for (const auto& m : rt.trace) best_tok = std::max(best_tok, m.dev_f1.value_or(0));

  o.require(best_seq >= 0.95, "sequence F1 below 0.95");
  o.require(best_tok >= 0.90, "token soft-match F1 below 0.90");
  o.detail << (o.pass ? "" : "; ") << "sequence F1 " << format_metric(best_seq) << ", token soft-match F1 "
           << format_metric(best_tok) << " within 30 epochs";
}

void tokenizer_properties(Outcome& o) {
  const auto& v = testing::desk_vocab();
  Rng rng(2024);
  int agree = 0, round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string w = props::random_word(rng);
    const auto got = tokenize_word(w, v);
    if (got == oracle::brute_force_wordpiece(w, v)) {
      ++agree;
    } else {
      o.require(false, "greedy differs on " + w);
    }
    // [UNK] loses the surface form by design.
    if (got == std::vector<std::string>{"[UNK]"} || detokenize(got) == std::vector<std::string>{w}) {
      ++round_trips;
    } else {
      o.require(false, "round trip fails on " + w);
    }
  }
  std::size_t single = 0, total = 0;
  for (const auto* lex : {&testing::hp_lexicon(), &testing::synthetic_lexicon()}) {
    const auto ext = extend_vocab(v, *lex);
    for (const auto& w : lexicon_words(*lex)) {
      ++total;
      if (tokenize_word(w, ext.vocab).size() == 1) {
        ++single;
      } else {
        o.require(false, w + " is not one piece after extension");
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << agree << "/1000 greedy=exhaustive, " << round_trips << "/1000 round trips, "
           << single << "/" << total << " lexicon words single-piece";
}

void segmentation_properties(Outcome& o) {
  const auto docs = props::random_documents(150, testing::synthetic_lexicon(), 99);
  Rng rng(8);
  std::size_t bad = 0;
  for (const auto& d : docs) {
    const auto v = props::segmentation_violations(d, testing::desk_vocab(), 8 + static_cast<int>(rng.below(200)));
    bad += !v.empty();
    if (!v.empty()) o.require(false, v.front());
  }
  o.detail << (o.pass ? "" : "; ") << docs.size() - bad << "/" << docs.size() << " documents satisfy coverage, "
           << "monotone counts and packing tightness";
}

void labeling_oracle(Outcome& o) {
  const auto& lex = testing::hp_lexicon();
  Rng rng(4242);
  int agree = 0, monotone = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto text = props::random_spell_text(rng, lex);
    bool same = true;
    for (auto mode : {MatchMode::incantations_only, MatchMode::combined}) {
      same = same && find_matches(text, lex, mode) == oracle::brute_force_matches(text, lex, mode);
    }
    agree += same;
    if (!same) o.require(false, "matcher differs on \"" + text + "\"");
    // Each incantation span sits inside a combined span.
    const auto inc = find_matches(text, lex, MatchMode::incantations_only);
    const auto all = find_matches(text, lex, MatchMode::combined);
    bool nested = true;
    for (const auto& s : inc) {
      nested = nested && std::any_of(all.begin(), all.end(),
                                     [&](const MatchSpan& c) { return c.start <= s.start && s.end <= c.end; });
    }
    nested = nested && (inc.empty() || !all.empty());
    monotone += nested;
    if (!nested) o.require(false, "mode monotonicity fails on \"" + text + "\"");
  }
  o.detail << (o.pass ? "" : "; ") << agree << "/1000 segments match the exhaustive scan, " << monotone
           << "/1000 mode-monotone";
}

bool iob_valid(const std::vector<Tag>& tags) {
  Tag prev = Tag::O;
  for (Tag t : tags) {
    if (t == Tag::I && prev == Tag::O) return false;
    prev = t;
  }
  return true;
}

void iob_and_softmatch(Outcome& o) {
  std::size_t checked = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticConfig sc;
    sc.seed = seed;
    sc.documents = 5;
    const auto docs = generate_documents(sc, testing::synthetic_lexicon());
    for (auto variant : {SplitVariant::sentence_split, SplitVariant::paragraph_split}) {
      const auto segs = segment_corpus(docs, SplitStrategy{variant, 384});
      for (const auto* lex : {&testing::synthetic_lexicon(), &testing::hp_lexicon()}) {
        for (auto mode : {MatchMode::incantations_only, MatchMode::combined}) {
          BuildConfig bc;
          bc.mode = mode;
          bc.seed = seed;
          std::vector<TokExample> all = build_token_eval_dataset(segs, *lex, mode);
          try {
            const auto ds = build_token_dataset(segs, *lex, bc);
            all.insert(all.end(), ds.train.begin(), ds.train.end());
            all.insert(all.end(), ds.dev.begin(), ds.dev.end());
          } catch (const BuildError&) {
            // no positives under this lexicon: the eval set alone is checked
          }
          for (const auto& e : all) {
            ++checked;
            if (!iob_valid(e.tags)) o.require(false, "invalid I in " + e.seg_id);
          }
        }
      }
    }
  }

  const std::vector<std::string> words = {"he", "shouted", "wingardium", "leviosa", "!"};
  const TokExample pos{"pos", words, {Tag::O, Tag::O, Tag::B, Tag::I, Tag::O}};
  const TokExample neg{"neg", {"quiet", "!"}, {Tag::O, Tag::O}};
  auto score = [](const TokExample& gold, std::vector<Tag> tags) {
    const std::vector<TokPrediction> p = {{gold.seg_id, gold.words, std::move(tags)}};
    return score_token_predictions_softmatch(p, std::vector<TokExample>{gold}).matrix;
  };
  o.require(score(pos, {Tag::O, Tag::O, Tag::O, Tag::I, Tag::O}) == ConfusionMatrix{1, 0, 0, 0},
            "second-word I is not a true positive");
  o.require(score(neg, {Tag::O, Tag::B}) == ConfusionMatrix{0, 1, 0, 0}, "tagged punctuation is not a false positive");
  o.require(score(pos, std::vector<Tag>(5, Tag::O)) == ConfusionMatrix{0, 0, 1, 0}, "all-O is not a false negative");
  o.detail << (o.pass ? "" : "; ") << checked << " built examples IOB-valid, 3/3 soft-match examples";
}

// ---- 4 ---------------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  std::ostringstream out, e;
  const int code = run_cli(args, out, e);
  if (err) *err = e.str();
  return code;
}

// Every file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  }
  return files;
}

void determinism(Outcome& o) {
  const auto data = testing::data_dir();
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"accept_run_a", "accept_run_b"}) {
    const auto d = testing::scratch_dir(name);
    const auto s = [&](const char* f) { return (d / f).string(); };
    std::string err;
    const std::vector<std::vector<std::string>> steps = {
        {"ingest", "--input", (data / "synthetic/train").string(), "--out", s("train.seg.jsonl")},
        {"ingest", "--input", (data / "synthetic/eval").string(), "--out", s("eval.seg.jsonl")},
        {"build", "--segments", s("train.seg.jsonl"), "--lexicon", (data / "synthetic_spells.jsonl").string(), "--out",
         s("ds")},
        {"build", "--segments", s("eval.seg.jsonl"), "--lexicon", (data / "synthetic_spells.jsonl").string(), "--out",
         s("gold"), "--eval"},
        {"train", "--dataset", s("ds"), "--vocab", (data / "desk_vocab.txt").string(), "--epochs", "3", "--seed", "5",
         "--out", s("model.ckpt")},
        {"predict", "--checkpoint", s("model.ckpt"), "--segments", s("eval.seg.jsonl"), "--out", s("pred.jsonl")},
        {"evaluate", "--predictions", s("pred.jsonl"), "--gold", s("gold/eval.jsonl"), "--out", s("report.json")},
    };
    for (const auto& step : steps) {
      if (cli(step, &err) != 0) {
        o.require(false, step.front() + " failed: " + err);
        return;
      }
    }
    runs.push_back(snapshot(d));
  }
  for (const char* f : {"ds/train.jsonl", "ds/dev.jsonl", "ds/manifest.json", "model.ckpt", "pred.jsonl", "report.json"}) {
    o.require(runs[0].count(f) == 1, std::string(f) + " missing");
  }
  std::size_t same = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it != runs[1].end() && it->second == bytes) {
      ++same;
    } else {
      o.require(false, name + " differs");
    }
  }
  o.require(runs[0].size() == runs[1].size(), "file sets differ");
  o.detail << (o.pass ? "" : "; ") << same << "/" << runs[0].size() << " artifacts byte-identical";
}

// ---- 5 ---------------------------------------------------------------------

void extension_direction(Outcome& o) {
  using namespace model;
  const auto& base = testing::desk_vocab();
  const auto& lex = testing::synthetic_lexicon();
  std::size_t fragmented = 0;
  const auto words = lexicon_words(lex);
  for (const auto& w : words) fragmented += tokenize_word(w, base).size() > 1;
  o.require(fragmented > 0, "no lexicon word is fragmented by the base vocabulary");
  const auto ext = extend_vocab(base, lex);

  SyntheticConfig sc;
  sc.seed = 77;
  sc.documents = 20;
  const auto segs = sentences_of(generate_documents(sc, lex));
  int wins = 0;
  std::ostringstream runs;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    BuildConfig bc;
    bc.seed = seed;
    const auto ds = build_sequence_dataset(segs, lex, bc);
    TrainConfig t;
    t.seed = seed;
    t.epochs = 8;
    t.max_len = 64;
    auto run = [&](const Vocabulary& v) {
      ModelConfig cfg;
      cfg.vocab_size = static_cast<int>(v.size());
      const auto r = train_sequence(init_params<double>(cfg, seed), cfg, Pooling::cls, v, ds.train, ds.dev, t);
      return r.trace.back().dev_f1.value_or(0);
    };
    const double f_base = run(base);
    const double f_ext = run(ext.vocab);
    wins += f_ext >= f_base;
    runs << " seed " << seed << ": " << format_metric(f_base) << " -> " << format_metric(f_ext) << ";";
  }
  o.require(wins >= 2, "extension lost on a majority of seeds");
  o.detail << (o.pass ? "" : "; ") << fragmented << "/" << words.size() << " spell words fragmented, "
           << "extended >= base on " << wins << "/3 seeds (dev F1" << runs.str() << ")";
}

}  // namespace

// An optional argument restricts the run to criteria whose label contains it.
int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"1  metric oracle", metric_oracle},
      {"2  dataset size law", size_law},
      {"3a gradient check", gradient_check},
      {"3b overfit smoke test", overfit},
      {"3c tokenizer properties", tokenizer_properties},
      {"3d segmentation properties", segmentation_properties},
      {"3e labeling oracle", labeling_oracle},
      {"3f IOB validity and soft-match rules", iob_and_softmatch},
      {"4  determinism", determinism},
      {"5  vocabulary extension direction", extension_direction},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (name.find(only) == std::string::npos) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " -- " << o.detail.str() << " [" << std::fixed
              << std::setprecision(1) << secs << "s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
