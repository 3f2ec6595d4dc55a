#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spellscan/model/model.hpp"

namespace spellscan {

struct TokenAttribution {
  std::string piece;
  std::optional<int> word_id;
  double weight = 0;  // in [-1, 1]
};

struct AttributionReport {
  std::string seg_id;
  std::vector<TokenAttribution> attributions;  // real pieces only, no specials or padding
  double attribution_score = 0;                // sum of weights
  Label attribute_label = Label::positive;     // class whose logit was attributed
  Label predicted_label = Label::negative;
  double predicted_probability = 0;  // model probability of the positive class
};

// Gradient x input on the target-class logit w.r.t. each piece's token
// embedding. Position rows are shared by every piece in that slot, so they are
// left out of the product. Scaled by the largest magnitude so the extreme
// weight is +-1. An all-zero vector stays zero. Throws
// AttributionError on non-finite gradients.
AttributionReport attribute_sequence(const model::Params& params, const model::ModelConfig& cfg,
                                     model::Pooling pooling, std::string seg_id, std::string_view text,
                                     const Vocabulary& vocab, Label target, int max_len);

enum class RenderFormat { ansi, html };
RenderFormat parse_render_format(std::string_view name);

// Background colour for a weight: white at 0, pure green at +1, pure red at -1.
struct Rgb {
  int r = 255, g = 255, b = 255;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
Rgb weight_color(double weight);

std::string render_attribution(const AttributionReport& report, RenderFormat format);

Json report_to_json(const AttributionReport& report);

}  // namespace spellscan
