#include "spellscan/spellbook.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "spellscan/corpus.hpp"
#include "spellscan/errors.hpp"
#include "spellscan/hash.hpp"
#include "spellscan/jsonl.hpp"
#include "spellscan/text.hpp"

namespace spellscan {
namespace {

SpellCategory parse_category(std::string_view name) {
  if (name == "incantation_with_name") return SpellCategory::incantation_with_name;
  if (name == "incantation_only") return SpellCategory::incantation_only;
  if (name == "name_only") return SpellCategory::name_only;
  if (name == "action_as_spell") return SpellCategory::action_as_spell;
  throw LexiconError("unknown category '" + std::string(name) + "'");
}

std::string clean_phrase(std::string_view raw) {
  std::string s = to_lower(raw);
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) throw LexiconError("empty phrase");
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct Occurrence {
  std::size_t start;
  std::size_t end;
};

std::vector<Occurrence> occurrences(std::string_view text, std::string_view phrase) {
  std::vector<Occurrence> out;
  std::size_t pos = text.find(phrase);
  while (pos != std::string_view::npos) {
    const std::size_t end = pos + phrase.size();
    if (word_boundary_before(text, pos) && word_boundary_after(text, end)) out.push_back({pos, end});
    pos = text.find(phrase, pos + 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(SpellCategory category) {
  switch (category) {
    case SpellCategory::incantation_with_name: return "incantation_with_name";
    case SpellCategory::incantation_only: return "incantation_only";
    case SpellCategory::name_only: return "name_only";
    case SpellCategory::action_as_spell: return "action_as_spell";
  }
  return "";
}

std::string_view to_string(MatchMode mode) {
  return mode == MatchMode::incantations_only ? "incantations" : "combined";
}

MatchMode parse_match_mode(std::string_view name) {
  if (name == "incantations" || name == "incantations_only") return MatchMode::incantations_only;
  if (name == "combined") return MatchMode::combined;
  throw ConfigError("unknown match mode '" + std::string(name) + "'");
}

SpellLexicon::SpellLexicon(std::vector<SpellEntry> entries, std::vector<std::string> excluded)
    : entries_(std::move(entries)), excluded_(std::move(excluded)) {
  std::unordered_set<std::string> seen;
  auto claim = [&seen](const std::string& phrase) {
    if (!seen.insert(phrase).second) throw LexiconError("duplicate phrase '" + phrase + "'");
  };
  for (auto& e : entries_) {
    if (e.incantation) e.incantation = clean_phrase(*e.incantation);
    for (auto& n : e.names) n = clean_phrase(n);
    const bool has_inc = e.incantation.has_value();
    if (!has_inc && e.names.empty()) throw LexiconError("entry without incantation or names");
    switch (e.category) {
      case SpellCategory::incantation_with_name:
        if (!has_inc || e.names.empty()) {
          throw LexiconError("incantation_with_name entry needs an incantation and a name");
        }
        break;
      case SpellCategory::incantation_only:
        if (!has_inc || !e.names.empty()) {
          throw LexiconError("incantation_only entry needs exactly an incantation");
        }
        break;
      case SpellCategory::name_only:
      case SpellCategory::action_as_spell:
        if (has_inc) {
          throw LexiconError("entry '" + *e.incantation + "' of category " +
                             std::string(to_string(e.category)) + " cannot have an incantation");
        }
        break;
    }
    if (has_inc) claim(*e.incantation);
    for (const auto& n : e.names) claim(n);
  }
  std::unordered_set<std::string> excluded_seen;
  for (auto& x : excluded_) {
    x = clean_phrase(x);
    if (seen.contains(x)) throw LexiconError("excluded phrase '" + x + "' is also a spell phrase");
    if (!excluded_seen.insert(x).second) throw LexiconError("duplicate excluded phrase '" + x + "'");
  }
}

std::vector<Phrase> SpellLexicon::phrases(MatchMode mode) const {
  std::vector<Phrase> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.incantation) out.push_back(Phrase{*e.incantation, i, true});
    if (mode == MatchMode::combined) {
      for (const auto& n : e.names) out.push_back(Phrase{n, i, false});
    }
  }
  return out;
}

std::string SpellLexicon::to_text() const {
  std::string out;
  for (const auto& e : entries_) {
    Json j;
    j["category"] = to_string(e.category);
    if (e.incantation) j["incantation"] = *e.incantation;
    j["names"] = e.names;
    out += j.dump();
    out += '\n';
  }
  if (!excluded_.empty()) {
    Json j;
    j["excluded"] = true;
    j["names"] = excluded_;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string SpellLexicon::hash() const { return fnv1a_hex(to_text()); }

SpellLexicon parse_lexicon(std::string_view content) {
  JsonlFile file;
  file = parse_jsonl(content);
  std::vector<SpellEntry> entries;
  std::vector<std::string> excluded;
  std::size_t line = 0;
  for (const auto& r : file.records) {
    ++line;
    try {
      if (r.value("excluded", false)) {
        for (const auto& n : r.at("names")) excluded.push_back(n.get<std::string>());
        continue;
      }
      SpellEntry e;
      e.category = parse_category(r.at("category").get<std::string>());
      if (r.contains("incantation") && !r["incantation"].is_null()) {
        e.incantation = r["incantation"].get<std::string>();
      }
      if (r.contains("names")) e.names = r["names"].get<std::vector<std::string>>();
      entries.push_back(std::move(e));
    } catch (const Json::exception& ex) {
      throw FormatError(std::string("bad lexicon record: ") + ex.what(), line);
    }
  }
  return SpellLexicon(std::move(entries), std::move(excluded));
}

SpellLexicon load_lexicon(const std::filesystem::path& path) {
  try {
    return parse_lexicon(read_file(path));
  } catch (const LexiconError& e) {
    throw LexiconError(path.string() + ": " + e.what());
  }
}

bool word_boundary_before(std::string_view text, std::size_t pos) {
  if (pos == 0) return true;
  const std::size_t prev = previous_code_point(text, pos);
  auto cp = decode_utf8(text, prev);
  return !cp || !is_alphanumeric(cp->value);
}

bool word_boundary_after(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return true;
  auto cp = decode_utf8(text, pos);
  return !cp || !is_alphanumeric(cp->value);
}

std::vector<MatchSpan> find_matches(std::string_view text, const SpellLexicon& lexicon, MatchMode mode) {
  // Phrases bucketed by first byte, longest first.
  const std::vector<Phrase> phrases = lexicon.phrases(mode);
  std::unordered_map<unsigned char, std::vector<const Phrase*>> by_first;
  for (const auto& p : phrases) by_first[static_cast<unsigned char>(p.text[0])].push_back(&p);
  for (auto& [c, list] : by_first) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Phrase* a, const Phrase* b) { return a->text.size() > b->text.size(); });
  }

  std::vector<Occurrence> blocked;
  for (const auto& x : lexicon.excluded_phrases()) {
    auto occ = occurrences(text, x);
    blocked.insert(blocked.end(), occ.begin(), occ.end());
  }
  auto is_blocked = [&blocked](std::size_t s, std::size_t e) {
    return std::any_of(blocked.begin(), blocked.end(),
                       [&](const Occurrence& o) { return o.start <= s && e <= o.end; });
  };

  std::vector<MatchSpan> spans;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto it = by_first.find(static_cast<unsigned char>(text[pos]));
    if (it == by_first.end() || !word_boundary_before(text, pos)) {
      ++pos;
      continue;
    }
    const Phrase* hit = nullptr;
    for (const Phrase* p : it->second) {
      const std::size_t end = pos + p->text.size();
      if (end > text.size() || text.compare(pos, p->text.size(), p->text) != 0) continue;
      if (!word_boundary_after(text, end) || is_blocked(pos, end)) continue;
      hit = p;
      break;
    }
    if (hit == nullptr) {
      ++pos;
      continue;
    }
    spans.push_back(MatchSpan{hit->text, pos, pos + hit->text.size(), hit->entry});
    pos += hit->text.size();
  }
  return spans;
}

std::vector<MatchSpan> find_matches(const Segment& segment, const SpellLexicon& lexicon, MatchMode mode) {
  return find_matches(segment.text, lexicon, mode);
}

SegmentLabel label_segment(std::string_view text, const SpellLexicon& lexicon, MatchMode mode) {
  SegmentLabel label;
  label.spans = find_matches(text, lexicon, mode);
  label.positive = !label.spans.empty();
  return label;
}

SegmentLabel label_segment(const Segment& segment, const SpellLexicon& lexicon, MatchMode mode) {
  return label_segment(segment.text, lexicon, mode);
}

}  // namespace spellscan
