#include "spellscan/attribution.hpp"

#include <cmath>
#include <cstdio>

#include "spellscan/errors.hpp"

namespace spellscan {

using namespace model;

AttributionReport attribute_sequence(const Params& params, const ModelConfig& cfg, Pooling pooling,
                                     std::string seg_id, std::string_view text, const Vocabulary& vocab, Label target,
                                     int max_len) {
  check_vocab_fits(params, vocab);
  const Encoding enc = encode_text(text, vocab, max_len);
  const Index len = enc.real_length();
  EncoderCache<double> cache;
  const Matrix<double>& states =
      encode(params, cfg, std::span<const int>(enc.ids.data(), static_cast<std::size_t>(len)), len, cache);
  PoolCache<double> pcache;
  const RowVector<double> logits = sequence_logits(params, states, len, pooling, &pcache);
  const RowVector<double> probs = softmax(logits);

  Params grads = params.zeros_like();
  RowVector<double> d_logits = RowVector<double>::Zero(2);
  d_logits(static_cast<int>(target)) = 1.0;
  const Matrix<double> d_states = sequence_head_backward(params, pcache, len, d_logits, grads);
  const Matrix<double> d_input = encode_backward(params, cfg, cache, d_states, grads);

  AttributionReport report;
  report.seg_id = std::move(seg_id);
  report.attribute_label = target;
  report.predicted_probability = probs(1);
  report.predicted_label = probs(1) > probs(0) ? Label::positive : Label::negative;

  double max_abs = 0;
  for (Index t = 0; t < len; ++t) {
    if (!enc.word_ids[static_cast<std::size_t>(t)]) continue;  // [CLS], [SEP]
    const int id = enc.ids[static_cast<std::size_t>(t)];
    const double w = d_input.row(t).dot(params.token_embeddings.row(id));
    if (!std::isfinite(w)) throw AttributionError("non-finite attribution for piece " + std::to_string(t));
    report.attributions.push_back(TokenAttribution{enc.pieces[static_cast<std::size_t>(t)],
                                                   enc.word_ids[static_cast<std::size_t>(t)], w});
    max_abs = std::max(max_abs, std::abs(w));
  }
  for (auto& a : report.attributions) {
    if (max_abs > 0) a.weight /= max_abs;
    report.attribution_score += a.weight;
  }
  return report;
}

RenderFormat parse_render_format(std::string_view name) {
  if (name == "ansi") return RenderFormat::ansi;
  if (name == "html") return RenderFormat::html;
  throw ConfigError("unknown render format '" + std::string(name) + "' (expected ansi or html)");
}

Rgb weight_color(double weight) {
  const double a = std::min(1.0, std::abs(weight));
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - a)));
  if (weight > 0) return Rgb{fade, 255, fade};
  if (weight < 0) return Rgb{255, fade, fade};
  return Rgb{};
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string header_text(const AttributionReport& r) {
  return r.seg_id + " | attribute label: " + std::string(to_string(r.attribute_label)) +
         " | predicted label: " + std::string(to_string(r.predicted_label)) + " (p=" +
         fixed4(r.predicted_probability) + ") | attribution score: " + fixed4(r.attribution_score) +
         " | weights: gradient x input on the target logit";
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_ansi(const AttributionReport& r) {
  std::string out = header_text(r) + "\n";
  for (std::size_t i = 0; i < r.attributions.size(); ++i) {
    const auto& a = r.attributions[i];
    if (i) out += ' ';
    if (a.weight == 0) {
      out += a.piece;
      continue;
    }
    const Rgb c = weight_color(a.weight);
    // Black text keeps pale backgrounds readable.
    out += "\x1b[38;2;0;0;0;48;2;" + std::to_string(c.r) + ";" + std::to_string(c.g) + ";" + std::to_string(c.b) +
           "m" + a.piece + "\x1b[0m";
  }
  out += "\n";
  return out;
}

std::string render_html(const AttributionReport& r) {
  std::string out =
      "<!DOCTYPE html>\n"
      "<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n"
      "<head>\n<meta charset=\"utf-8\"/>\n<title>" +
      escape_xml(r.seg_id) +
      "</title>\n"
      "<style>body{font-family:sans-serif} .tokens span{padding:0 2px}</style>\n"
      "</head>\n<body>\n<p class=\"header\">" +
      escape_xml(header_text(r)) + "</p>\n<p class=\"tokens\">";
  for (std::size_t i = 0; i < r.attributions.size(); ++i) {
    const auto& a = r.attributions[i];
    if (i) out += ' ';
    if (a.weight == 0) {
      out += "<span>" + escape_xml(a.piece) + "</span>";
      continue;
    }
    const Rgb c = weight_color(a.weight);
    out += "<span style=\"background-color:rgb(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," +
           std::to_string(c.b) + ")\" title=\"" + fixed4(a.weight) + "\">" + escape_xml(a.piece) + "</span>";
  }
  out += "</p>\n</body>\n</html>\n";
  return out;
}

}  // namespace

std::string render_attribution(const AttributionReport& report, RenderFormat format) {
  return format == RenderFormat::ansi ? render_ansi(report) : render_html(report);
}

Json report_to_json(const AttributionReport& r) {
  Json j;
  j["seg_id"] = r.seg_id;
  j["attribute_label"] = to_string(r.attribute_label);
  j["predicted_label"] = to_string(r.predicted_label);
  j["predicted_probability"] = r.predicted_probability;
  j["attribution_score"] = r.attribution_score;
  j["method"] = "gradient_x_input_logit";
  Json list = Json::array();
  for (const auto& a : r.attributions) {
    list.push_back({{"piece", a.piece}, {"word_id", a.word_id ? Json(*a.word_id) : Json(nullptr)}, {"weight", a.weight}});
  }
  j["attributions"] = std::move(list);
  return j;
}

}  // namespace spellscan
