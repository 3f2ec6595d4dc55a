#include "spellscan/synthetic.hpp"

#include <cstdio>
#include <set>
#include <string_view>

#include "spellscan/text.hpp"
#include "spellscan/tokenizer.hpp"

namespace spellscan {

namespace {

// Slots: {N} {N2} first names, {S} {S2} surnames, {H} possessive, {P} place,
// {O} object, {T} time, {A} adjective, {V} effect, {X} spell phrase.
const std::vector<std::string_view> kPlain = {
    "{N} walked slowly to the {P}.",
    "It was nearly {T} when they reached the {P}.",
    "\"I don't know,\" said {N}, staring at the {O}.",
    "Mr. {S} looked at the {O} for a long time.",
    "Mrs. {S} poured the tea and sat down by the {O}.",
    "Prof. {S} was waiting in the {P}.",
    "{N} and {N2} had not spoken since {T}.",
    "The {O} on the table was old and {A}.",
    "\"Where have you been?\" asked {N}.",
    "Nobody noticed the {O} until it was too late.",
    "{N} laughed, but {H} eyes were {A}.",
    "Rain drummed against the {O} all through the night.",
    "They ate in silence, listening to the wind outside the {P}.",
    "{N} picked up the {O} and put it back on the shelf.",
    "\"We should go,\" whispered {N}. \"It's late.\"",
    "The {P} smelled of dust and {A} candles.",
    "{N} wondered whether {N2} had told the truth.",
    "By {T} the {P} was completely empty.",
    "Mr. {S} and Mrs. {S2} argued about the {O} again.",
    "\"Really?\" said {N}. \"I thought you knew.\"",
    "{N} counted the steps of the {P} twice.",
    "A small {A} owl landed on the {O}.",
    "Dinner was late, and everyone in the {P} was hungry.",
    "{N} wrote a long letter and sealed it carefully.",
    "The {O} creaked as {N} leaned against it.",
    "Outside, the {P} was covered in snow.",
    "{N} said nothing for a while!",
    "Why would anyone leave the {O} in the {P}?",
    "{N} waited... then walked away.",
    "Everyone agreed that {N2} was the best cook in the {P}.",
};

const std::vector<std::string_view> kDecoy = {
    "{N} raised {H} wand but did nothing.",
    "The charm on the {O} had long since faded.",
    "{N} read about an old spell in the library.",
    "They practised defensive spells all afternoon.",
    "Mr. {S} kept his wand in the {O}.",
    "The curse, people said, was only a story.",
    "{N} polished the wand until it gleamed.",
    "Every spell book in the {P} was missing.",
    "The hex marks on the {O} looked new.",
    "Learning a new charm takes patience, said Prof. {S}.",
};

const std::vector<std::string_view> kIncantation = {
    "\"{X}!\" shouted {N}, aiming {H} wand at the {O}.",
    "{N} raised the wand and said, \"{X}!\"",
    "With a flick of the wrist, {N} muttered \"{X}\" and the {O} {V}.",
    "\"{X},\" whispered {N}, and the {O} {V}.",
    "Mr. {S} pointed at the {O}. \"{X}!\"",
};

const std::vector<std::string_view> kName = {
    "{N} had been practising the {X} all week.",
    "The {X} hit the {O} and it {V}.",
    "Mr. {S} explained that the {X} was harder than it looked.",
    "Nobody in the {P} could perform the {X} properly.",
    "{N} wrote an essay about the {X} for Prof. {S}.",
};

const std::vector<std::string> kFirst = {"Harrow", "Elspeth", "Tobias",  "Mirela", "Caspian", "Odile",
                                         "Fenwick", "Rosalind", "Bram",  "Ines",   "Lysander", "Wren",
                                         "Cassius", "Maude",    "Ignatius", "Thea"};
const std::vector<std::string> kSurname = {"Thornbury",  "Ashcombe", "Quillfeather", "Blackwood",
                                           "Fairweather", "Merrow",  "Holloway",     "Grimsby"};
const std::vector<std::string_view> kPlace = {"kitchen", "library",   "corridor",  "garden",      "tower",
                                              "great hall", "station", "forest",  "village",     "common room",
                                              "dungeon", "greenhouse", "staircase"};
const std::vector<std::string_view> kObject = {"door",   "feather", "cup",    "lamp",   "window",   "book",   "chair",
                                               "trunk",  "mirror",  "candle", "letter", "cauldron", "teapot"};
const std::vector<std::string_view> kTime = {"midnight", "noon", "dawn", "dusk", "morning"};
const std::vector<std::string_view> kAdjective = {"tired", "bright", "dusty", "quiet", "strange", "cold", "worn",
                                                  "silver"};
const std::vector<std::string_view> kEffect = {"flew across the room", "burst into flames", "froze solid",
                                               "shattered",            "began to glow",     "vanished",
                                               "rose into the air",    "fell silent"};
const std::vector<std::string_view> kPossessive = {"his", "her"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.below(items.size()))];
}

std::string title_case(std::string_view phrase) {
  std::string out(phrase);
  bool start = true;
  for (char& c : out) {
    if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    start = c == ' ' || c == '-';
  }
  return out;
}

std::string fill(Rng& rng, std::string_view tmpl, const std::string& phrase) {
  std::string out;
  const std::size_t a = static_cast<std::size_t>(rng.below(kFirst.size()));
  const std::size_t b = (a + 1 + static_cast<std::size_t>(rng.below(kFirst.size() - 1))) % kFirst.size();
  const std::string& first = kFirst[a];
  const std::string& second = kFirst[b];  // always a different person
  const std::string surname = pick(rng, kSurname);
  const std::string surname2 = pick(rng, kSurname);
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] != '{') {
      out += tmpl[i++];
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    const std::string_view slot = tmpl.substr(i + 1, close - i - 1);
    i = close + 1;
    if (slot == "N") out += first;
    else if (slot == "N2") out += second;
    else if (slot == "S") out += surname;
    else if (slot == "S2") out += surname2;
    else if (slot == "H") out += pick(rng, kPossessive);
    else if (slot == "P") out += pick(rng, kPlace);
    else if (slot == "O") out += pick(rng, kObject);
    else if (slot == "T") out += pick(rng, kTime);
    else if (slot == "A") out += pick(rng, kAdjective);
    else if (slot == "V") out += pick(rng, kEffect);
    else if (slot == "X") out += phrase;
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace

std::string synthetic_sentence(Rng& rng, const Phrase* phrase, bool decoy) {
  if (phrase) {
    const auto& templates = phrase->incantation ? kIncantation : kName;
    return fill(rng, pick(rng, templates), title_case(phrase->text));
  }
  return fill(rng, decoy ? pick(rng, kDecoy) : pick(rng, kPlain), "");
}

std::vector<SyntheticDocument> generate_corpus(const SyntheticConfig& cfg, const SpellLexicon& lexicon) {
  Rng rng(cfg.seed);
  const std::vector<Phrase> phrases = lexicon.phrases(MatchMode::combined);
  auto between = [&rng](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
  std::vector<SyntheticDocument> docs;
  for (int d = 0; d < cfg.documents; ++d) {
    std::string text;
    const int paragraphs = between(cfg.min_paragraphs, cfg.max_paragraphs);
    for (int p = 0; p < paragraphs; ++p) {
      if (p) text += "\n\n";
      if (rng.uniform() < 0.2) text += "  ";  // indented paragraph
      const int sentences = between(cfg.min_sentences, cfg.max_sentences);
      for (int s = 0; s < sentences; ++s) {
        if (s) text += rng.uniform() < 0.15 ? "\n" : " ";
        const double roll = rng.uniform();
        if (!phrases.empty() && roll < cfg.spell_rate) {
          text += synthetic_sentence(rng, &pick(rng, phrases), false);
        } else {
          text += synthetic_sentence(rng, nullptr, roll < cfg.spell_rate + cfg.decoy_rate);
        }
      }
    }
    text += "\n";
    if (rng.uniform() < cfg.crlf_rate) {
      std::string crlf;
      for (char c : text) {
        if (c == '\n') crlf += '\r';
        crlf += c;
      }
      text = std::move(crlf);
    }
    char name[32];
    std::snprintf(name, sizeof name, "%s_%03d", cfg.id_prefix.c_str(), d);
    docs.push_back(SyntheticDocument{name, std::move(text)});
  }
  return docs;
}

std::vector<RawDocument> generate_documents(const SyntheticConfig& cfg, const SpellLexicon& lexicon) {
  std::vector<RawDocument> out;
  for (auto& d : generate_corpus(cfg, lexicon)) out.push_back(make_document(d.name, d.raw));
  return out;
}

const std::vector<std::string>& synthetic_first_names() { return kFirst; }
const std::vector<std::string>& synthetic_surnames() { return kSurname; }

std::vector<std::string> synthetic_common_words() {
  std::set<std::string> words;
  auto add_text = [&words](std::string_view text) {
    for (const Word& w : split_words(to_lower(text))) {
      bool alpha = true;
      for (char c : w.text) alpha &= (c >= 'a' && c <= 'z');
      if (alpha && !w.text.empty()) words.insert(w.text);
    }
  };
  auto strip_slots = [](std::string_view t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '{') {
        i = t.find('}', i);
        out += ' ';
      } else {
        out += t[i];
      }
    }
    return out;
  };
  for (const auto* list : {&kPlain, &kDecoy, &kIncantation, &kName}) {
    for (auto t : *list) add_text(strip_slots(t));
  }
  for (const auto* list : {&kPlace, &kObject, &kTime, &kAdjective, &kEffect, &kPossessive}) {
    for (auto t : *list) add_text(t);
  }
  return {words.begin(), words.end()};
}

}  // namespace spellscan
