#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "spellscan/corpus.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/random.hpp"
#include "spellscan/synthetic.hpp"
#include "spellscan/text.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace spellscan;

namespace {

std::vector<std::string> texts(const std::vector<Segment>& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) out.push_back(s.text);
  return out;
}

std::string strip_space(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\n' && c != '\t') out += c;
  }
  return out;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("normalization lowercases, trims lines and unifies line endings") {
    CHECK(normalize_text("  Hello World!  \r\nSecond\tLine\rThird ") == "hello world!\nsecond\tline\nthird");
    CHECK(normalize_text("ÉCOLE Ω") == "école ω");
  }

  TEST_CASE("normalization rejects empty, blank and malformed input") {
    CHECK_THROWS_AS(normalize_text(""), IngestError);
    CHECK_THROWS_AS(normalize_text(" \n\t\r\n"), IngestError);
    try {
      normalize_text(std::string("abc\xff"));
      FAIL("expected an ingest error");
    } catch (const IngestError& e) {
      CHECK(e.byte_offset() == 3);
    }
  }

  TEST_CASE("abbreviations and initials do not end sentences") {
    const auto doc = make_document("d", "Mr. Potter met J. Smith at noon. They talked.");
    const auto s = split_sentences(doc);
    REQUIRE(s.size() == 2);
    CHECK(s[0].text == "mr. potter met j. smith at noon.");
    CHECK(s[1].text == "they talked.");
    CHECK(s[1].sentence_indices == std::vector<int>{1});
  }

  TEST_CASE("terminal runs, ellipses and dialogue") {
    auto s = texts(split_sentences(make_document("d", "What?! No... Fine.")));
    CHECK(s == std::vector<std::string>{"what?!", "no...", "fine."});

    // A quote closing after the mark continues the sentence unless a new
    // quotation opens.
    s = texts(split_sentences(make_document("d", "\"Really?\" said Tom. \"I thought you knew.\"")));
    CHECK(s == std::vector<std::string>{"\"really?\" said tom.", "\"i thought you knew.\""});
    s = texts(split_sentences(make_document("d", "\"We should go,\" whispered Wren. \"It's late.\" Then silence.")));
    CHECK(s == std::vector<std::string>{"\"we should go,\" whispered wren.", "\"it's late.\" then silence."});
  }

  TEST_CASE("blank lines separate paragraphs and hard-stop sentences") {
    const auto doc = make_document("d", "One two\n\nThree. Four.\nFive\n\n\n  Six.");
    const auto paras = split_paragraphs(doc);
    REQUIRE(paras.size() == 3);
    CHECK(paras[1].text == "three. four. five");
    CHECK(paras[1].sentence_indices == std::vector<int>{1, 2, 3});
    const auto sents = split_sentences(doc);
    CHECK(texts(sents) == std::vector<std::string>{"one two", "three.", "four.", "five", "six."});
  }

  TEST_CASE("segment ids and json round trip") {
    const auto doc = make_document("book1", "Alpha beta. Gamma delta.");
    const auto sents = split_sentences(doc);
    REQUIRE(sents.size() == 2);
    CHECK(sents[1].seg_id == "book1:sentence:1");
    for (const auto& s : sents) CHECK(segment_from_json(segment_to_json(s)) == s);
    const auto file = segments_to_jsonl(sents);
    CHECK(segments_from_jsonl(parse_jsonl(format_jsonl(file))) == sents);
  }

  TEST_CASE("packing is greedy per document and flags oversized sentences") {
    const auto words = [](std::string_view t) {
      return static_cast<std::size_t>(std::count(t.begin(), t.end(), ' ') + 1);
    };
    std::vector<Segment> sents;
    for (const auto& [doc, text] : std::vector<std::pair<std::string, std::string>>{
             {"a", "one two three"}, {"a", "four five"}, {"a", "w w w w w w w w w w"}, {"a", "x y"}, {"b", "p q"}}) {
      Segment s;
      s.doc_id = doc;
      s.text = text;
      s.sentence_indices = {static_cast<int>(sents.size())};
      sents.push_back(s);
    }
    const auto packs = pack_sequences(sents, 8, words);
    REQUIRE(packs.size() == 4);
    CHECK(packs[0].text == "one two three four five");
    CHECK(packs[0].sentence_indices == std::vector<int>{0, 1});
    CHECK(packs[1].oversized);
    CHECK(packs[2].text == "x y");
    CHECK(packs[3].seg_id == "b:packed:0");
    CHECK(packs[2].seg_id == "a:packed:2");
    CHECK(oracle::next_fit_pack_count({{3, 2, 10, 2}, {2}}, 8) == packs.size());
    CHECK_THROWS_AS(pack_sequences(sents, 4, words), ConfigError);
  }

  TEST_CASE("documents load in file-name order") {
    const auto dir = testing::scratch_dir("corpus_load");
    write_file(dir / "b.txt", "Second doc.");
    write_file(dir / "a.txt", "First doc.");
    write_file(dir / "skip.md", "not a corpus file");
    const auto docs = load_documents(dir);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "a");
    CHECK(docs[1].text == "second doc.");
    write_file(dir / "c.txt", std::string("bad \xc3"));
    CHECK_THROWS_AS(load_documents(dir), IngestError);
  }

  TEST_CASE("corpus hash tracks ids and text") {
    const auto a = split_sentences(make_document("d", "Alpha beta. Gamma delta."));
    auto b = a;
    CHECK(corpus_hash(a) == corpus_hash(b));
    b[1].text = "c e.";
    CHECK(corpus_hash(a) != corpus_hash(b));
  }

  TEST_CASE("synthetic documents cover every character of the source") {
    SyntheticConfig cfg;
    cfg.documents = 5;
    for (const auto& doc : generate_documents(cfg, testing::synthetic_lexicon())) {
      std::string joined;
      for (const auto& s : split_sentences(doc)) joined += s.text;
      CHECK(strip_space(joined) == strip_space(doc.text));
    }
  }

  TEST_CASE("segmentation properties over randomized documents") {
    const auto docs = props::random_documents(120, testing::synthetic_lexicon(), 314);
    REQUIRE(docs.size() == 120);
    Rng rng(5);
    for (const auto& d : docs) {
      const int budget = 8 + static_cast<int>(rng.below(120));
      for (const auto& v : props::segmentation_violations(d, testing::desk_vocab(), budget)) FAIL_CHECK(v);
    }
  }
}
