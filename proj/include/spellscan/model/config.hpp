#pragma once

#include <cstdint>
#include <string_view>

#include "spellscan/dataset.hpp"
#include "spellscan/jsonl.hpp"

namespace spellscan::model {

struct ModelConfig {
  int layers = 2;
  int hidden = 64;
  int heads = 2;
  int ffn = 256;
  int vocab_size = 0;
  int max_positions = 128;
  double dropout = 0.1;
  // Diagnostic: skip every transformer block and the final layer norm so the
  // encoder output is the raw input embedding.
  bool bag_of_embeddings = false;

  void validate() const;
  int head_dim() const { return hidden / heads; }
};

enum class Pooling { cls, mean, max };

std::string_view to_string(Pooling pooling);
Pooling parse_pooling(std::string_view name);

struct HeadConfig {
  Task task = Task::sequence;
  Pooling pooling = Pooling::cls;
};

struct TrainConfig {
  int epochs = 5;
  int batch_size = 16;
  double learning_rate = 1e-3;  // from scratch; 2e-5 when fine-tuning a loaded checkpoint
  std::uint64_t seed = 42;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_len = 128;

  void validate() const;
};

Json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const Json& j);
Json to_json(const HeadConfig& head);
HeadConfig head_config_from_json(const Json& j);
Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

}  // namespace spellscan::model
