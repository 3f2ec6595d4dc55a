#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/eval.hpp"
#include "spellscan/random.hpp"
#include "spellscan/synthetic.hpp"
#include "support.hpp"

using namespace spellscan;

namespace {

struct TableCase {
  const char* name;
  std::int64_t tp, fn, fp, tn;
  double printed;
};

// Published confusion matrices with their printed F1 values.
const std::vector<TableCase>& published_tables() {
  static const std::vector<TableCase> t = {
      {"sentence full", 279, 5, 78, 13880, 0.8705},         {"sentence inc", 112, 0, 67, 14063, 0.7698},
      {"sentence ext full", 278, 6, 75, 13883, 0.8728},     {"sentence ext inc", 111, 1, 42, 14088, 0.8377},
      {"paragraph full", 262, 9, 43, 6597, 0.9097},         {"paragraph inc", 106, 2, 23, 6780, 0.8945},
      {"sequence full", 197, 7, 11, 587, 0.9563},           {"sequence inc", 77, 7, 5, 716, 0.9277},
      {"sequence ext full", 195, 9, 9, 589, 0.9559},        {"sequence ext inc", 80, 3, 2, 717, 0.9697},
      {"token full", 274, 10, 129, 13829, 0.7977},          {"token inc", 110, 2, 103, 14027, 0.6769},
      {"token ext full", 54, 230, 57, 13901, 0.2880},       {"token ext inc", 28, 84, 43, 14087, 0.3060},
  };
  return t;
}

Segment seg(std::string id, std::string text) {
  Segment s;
  s.seg_id = std::move(id);
  s.doc_id = "t";
  s.text = std::move(text);
  return s;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("printed table scores are reproduced from their matrices") {
    for (const auto& c : published_tables()) {
      const auto r = f1_from_matrix(ConfusionMatrix{c.tp, c.fp, c.fn, c.tn});
      CHECK(r.f1 == doctest::Approx(oracle::f1_direct(c.tp, c.fp, c.fn)).epsilon(1e-12));
      if (std::string(c.name) == "token ext full") {
        // The printed 0.2880 disagrees with its own matrix.
        CHECK(format_metric(r.f1) == "0.2734");
        continue;
      }
      CHECK_MESSAGE(std::abs(r.f1 - c.printed) <= 0.0005, c.name);
    }
    const auto a = f1_from_matrix(ConfusionMatrix{279, 78, 5, 13880});
    CHECK(format_metric(a.f1) == "0.8705");
    CHECK(format_metric(f1_from_matrix(ConfusionMatrix{111, 42, 1, 14088}).f1) == "0.8377");
    CHECK(format_metric(f1_from_matrix(ConfusionMatrix{274, 129, 10, 13829}).f1) == "0.7977");
  }

  TEST_CASE("zero denominators") {
    const auto r = f1_from_matrix(ConfusionMatrix{0, 0, 0, 5});
    CHECK(r.precision == 0);
    CHECK(r.recall == 0);
    CHECK(r.f1 == 0);
    CHECK(f1_from_matrix(ConfusionMatrix{0, 3, 0, 0}).f1 == 0);
  }

  TEST_CASE("half-up formatting") {
    CHECK(format_metric(0.12345) == "0.1235");
    CHECK(format_metric(0.12344) == "0.1234");
    CHECK(format_metric(1.0) == "1.0000");
    CHECK(format_metric(0.0) == "0.0000");
  }

  TEST_CASE("sequence scoring matches a direct tally") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.below(40);
      std::vector<SeqExample> gold;
      std::vector<SeqPrediction> pred;
      std::vector<bool> g, p;
      for (std::size_t i = 0; i < n; ++i) {
        const bool gi = rng.uniform() < 0.3;
        const bool pi = rng.uniform() < 0.4;
        g.push_back(gi);
        p.push_back(pi);
        gold.push_back({"s" + std::to_string(i), "x", gi ? Label::positive : Label::negative});
        pred.push_back({"s" + std::to_string(i), pi ? Label::positive : Label::negative, pi ? 0.9 : 0.1});
      }
      std::vector<SeqPrediction> shuffled = pred;
      rng.shuffle(shuffled);
      const auto r = score_sequence_predictions(shuffled, gold);
      CHECK(r.matrix == oracle::tally(g, p));
      CHECK(r.matrix.total() == static_cast<std::int64_t>(n));
      CHECK(r.f1 == doctest::Approx(oracle::f1_direct(r.matrix.tp, r.matrix.fp, r.matrix.fn)).epsilon(1e-12));

      // Complementing every prediction swaps tp with fn and tn with fp.
      std::vector<SeqPrediction> flipped = pred;
      for (auto& x : flipped) x.label = x.label == Label::positive ? Label::negative : Label::positive;
      const auto f = score_sequence_predictions(flipped, gold).matrix;
      CHECK(f.tp == r.matrix.fn);
      CHECK(f.fn == r.matrix.tp);
      CHECK(f.fp == r.matrix.tn);
      CHECK(f.tn == r.matrix.fp);
    }
  }

  TEST_CASE("perfect and all-negative predictions") {
    std::vector<SeqExample> gold = {{"a", "", Label::positive}, {"b", "", Label::negative}};
    std::vector<SeqPrediction> pred = {{"a", Label::positive, 1}, {"b", Label::negative, 0}};
    CHECK(score_sequence_predictions(pred, gold).f1 == 1.0);
    pred[0].label = Label::negative;
    CHECK(score_sequence_predictions(pred, gold).f1 == 0.0);
  }

  TEST_CASE("misaligned predictions are rejected with the offending ids") {
    std::vector<SeqExample> gold = {{"a", "", Label::positive}, {"b", "", Label::negative}};
    std::vector<SeqPrediction> pred = {{"a", Label::positive, 1}, {"zz", Label::negative, 0}};
    try {
      score_sequence_predictions(pred, gold);
      FAIL("expected an alignment error");
    } catch (const AlignmentError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("b") != std::string::npos);
      CHECK(msg.find("zz") != std::string::npos);
    }
    pred[1].seg_id = "a";
    CHECK_THROWS_AS(score_sequence_predictions(pred, gold), AlignmentError);
    std::vector<TokExample> tg = {{"t", {"a", "b"}, {Tag::O, Tag::O}}};
    std::vector<TokPrediction> tp = {{"t", {"a"}, {Tag::O}}};
    CHECK_THROWS_AS(score_token_predictions_softmatch(tp, tg), AlignmentError);
  }

  TEST_CASE("soft matching rules") {
    const std::vector<std::string> words = {"he", "shouted", "wingardium", "leviosa", "!"};
    const std::vector<TokExample> gold = {{"pos", words, {Tag::O, Tag::O, Tag::B, Tag::I, Tag::O}},
                                          {"neg", {"quiet", "!"}, {Tag::O, Tag::O}}};
    auto run = [&](std::vector<Tag> pos_tags, std::vector<Tag> neg_tags) {
      std::vector<TokPrediction> p = {{"pos", words, std::move(pos_tags)}, {"neg", {"quiet", "!"}, std::move(neg_tags)}};
      return score_token_predictions_softmatch(p, gold).matrix;
    };
    // Only the second span word tagged I still counts.
    auto m = run({Tag::O, Tag::O, Tag::O, Tag::I, Tag::O}, {Tag::O, Tag::O});
    CHECK(m == ConfusionMatrix{1, 0, 0, 1});
    // A tagged punctuation mark in a spell-free sequence is a false positive.
    m = run({Tag::O, Tag::O, Tag::B, Tag::I, Tag::O}, {Tag::O, Tag::B});
    CHECK(m == ConfusionMatrix{1, 1, 0, 0});
    // Positive tags outside the gold span do not rescue a positive sequence.
    m = run({Tag::O, Tag::O, Tag::O, Tag::O, Tag::B}, {Tag::O, Tag::O});
    CHECK(m == ConfusionMatrix{0, 0, 1, 1});
    m = run(std::vector<Tag>(5, Tag::O), {Tag::O, Tag::O});
    CHECK(m == ConfusionMatrix{0, 0, 1, 1});
    CHECK(score_token_predictions_softmatch(std::vector<TokPrediction>{{"pos", words, {Tag::O, Tag::O, Tag::B, Tag::I, Tag::O}},
                                                                       {"neg", {"quiet", "!"}, {Tag::O, Tag::O}}},
                                            gold)
              .task == EvalTask::token_softmatch);
  }

  TEST_CASE("span decoding") {
    CHECK(decode_spans(std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::O, Tag::B}) ==
          std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {4, 5}});
    CHECK(decode_spans(std::vector<Tag>{Tag::I, Tag::I, Tag::B}) ==
          std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {2, 3}});
  }

  TEST_CASE("soft matching dominates exact span matching") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<TokExample> gold;
      std::vector<TokPrediction> pred;
      for (int s = 0; s < 6; ++s) {
        const std::size_t n = 1 + rng.below(8);
        TokExample g{"s" + std::to_string(s), std::vector<std::string>(n, "w"), {}};
        TokPrediction p{g.seg_id, g.words, {}};
        for (std::size_t i = 0; i < n; ++i) {
          g.tags.push_back(static_cast<Tag>(rng.below(3)));
          p.tags.push_back(static_cast<Tag>(rng.below(3)));
        }
        if (rng.uniform() < 0.3) p.tags = g.tags;
        gold.push_back(std::move(g));
        pred.push_back(std::move(p));
      }
      const auto soft = score_token_predictions_softmatch(pred, gold).matrix;
      const auto exact = score_token_predictions_exact(pred, gold);
      CHECK(soft.tp >= exact.tp);
    }
  }

  TEST_CASE("dictionary baseline") {
    const auto wl = ReferenceWordlist::parse("The\nhe\ncast\nat\nand\nsaid\ndoor\n");
    CHECK(wl.contains("the"));
    CHECK(baseline_flags("accio firebolt", wl));
    CHECK_FALSE(baseline_flags("The door, he said.", wl));
    CHECK_FALSE(baseline_flags("he cast 42 at the door", wl));
    CHECK(is_alphabetic_word("firebolt"));
    CHECK_FALSE(is_alphabetic_word("x2"));
    CHECK_FALSE(is_alphabetic_word(","));
    CHECK_THROWS_AS(ReferenceWordlist::parse("\n\n"), InputError);
  }

  TEST_CASE("adding character names removes name-only false positives") {
    const auto& lex = testing::synthetic_lexicon();
    auto wl = ReferenceWordlist::load(testing::data_dir() / "wordlist_common.txt");
    std::vector<Segment> segs = {seg("1", "they said glimmora at the door."), seg("2", "harrow walked to the door."),
                                 seg("3", "elspeth and harrow walked."), seg("4", "the door was quiet."),
                                 seg("5", "a vextaro hit the door.")};
    const auto before = dictionary_baseline(segs, wl, lex, MatchMode::combined);
    const auto names = ReferenceWordlist::load(testing::data_dir() / "character_names.txt");
    const std::vector<std::string> extra(names.words.begin(), names.words.end());
    wl.add(extra);
    const auto after = dictionary_baseline(segs, wl, lex, MatchMode::combined);
    CHECK(before.matrix.fp == 2);
    CHECK(after.matrix.fp == 0);
    CHECK(after.precision >= before.precision);
    CHECK(after.matrix.tp == before.matrix.tp);
  }

  TEST_CASE("report comparison and serialization") {
    const auto a = f1_from_matrix(ConfusionMatrix{279, 78, 5, 13880});
    const auto b = f1_from_matrix(ConfusionMatrix{278, 75, 6, 13883});
    CHECK(compare_reports(a, a) == ReportDelta{});
    const auto d = compare_reports(a, b);
    CHECK(d.f1 == doctest::Approx(b.f1 - a.f1));
    CHECK(d.f1 > 0);
    CHECK(d.tp == -1);
    CHECK(delta_from_json(delta_to_json(d)) == d);
    auto r = a;
    r.config = Json{{"mode", "combined"}};
    const auto j = report_to_json(r);
    CHECK(j.at("f1_display") == "0.8705");
    const auto back = report_from_json(j);
    CHECK(back.matrix == r.matrix);
    CHECK(back.f1 == r.f1);
    CHECK(back.config == r.config);
    const TokPrediction tp{"x", {"a", "b"}, {Tag::B, Tag::I}};
    CHECK(tok_prediction_from_json(prediction_to_json(tp)) == tp);
    const SeqPrediction sp{"y", Label::positive, 0.625};
    CHECK(seq_prediction_from_json(prediction_to_json(sp)) == sp);
  }
}
