#include "spellscan/model/config.hpp"

#include <string>

#include "spellscan/errors.hpp"

namespace spellscan::model {

void ModelConfig::validate() const {
  if (layers < 0 || hidden <= 0 || heads <= 0 || ffn <= 0 || vocab_size <= 0 || max_positions <= 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (hidden % heads != 0) {
    throw ConfigError("hidden " + std::to_string(hidden) + " is not divisible by heads " +
                      std::to_string(heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0,1)");
}

std::string_view to_string(Pooling pooling) {
  switch (pooling) {
    case Pooling::cls: return "cls";
    case Pooling::mean: return "mean";
    case Pooling::max: return "max";
  }
  return "";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "cls" || name == "CLS") return Pooling::cls;
  if (name == "mean" || name == "MEAN") return Pooling::mean;
  if (name == "max" || name == "MAX") return Pooling::max;
  throw ConfigError("unknown pooling '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
}

Json to_json(const ModelConfig& c) {
  Json j;
  j["layers"] = c.layers;
  j["hidden"] = c.hidden;
  j["heads"] = c.heads;
  j["ffn"] = c.ffn;
  j["vocab_size"] = c.vocab_size;
  j["max_positions"] = c.max_positions;
  j["dropout"] = c.dropout;
  j["bag_of_embeddings"] = c.bag_of_embeddings;
  return j;
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  try {
    c.layers = j.value("layers", c.layers);
    c.hidden = j.value("hidden", c.hidden);
    c.heads = j.value("heads", c.heads);
    c.ffn = j.value("ffn", c.ffn);
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.max_positions = j.value("max_positions", c.max_positions);
    c.dropout = j.value("dropout", c.dropout);
    c.bag_of_embeddings = j.value("bag_of_embeddings", c.bag_of_embeddings);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  return c;
}

Json to_json(const HeadConfig& h) {
  Json j;
  j["task"] = spellscan::to_string(h.task);
  j["pooling"] = to_string(h.pooling);
  return j;
}

HeadConfig head_config_from_json(const Json& j) {
  HeadConfig h;
  h.task = parse_task(j.value("task", "sequence"));
  h.pooling = parse_pooling(j.value("pooling", "cls"));
  return h;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["seed"] = c.seed;
  j["optimizer"] = {{"name", "adam"}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"epsilon", c.epsilon}};
  j["schedule"] = "constant";
  j["max_len"] = c.max_len;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.seed = j.value("seed", c.seed);
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      c.beta1 = o.value("beta1", c.beta1);
      c.beta2 = o.value("beta2", c.beta2);
      c.epsilon = o.value("epsilon", c.epsilon);
    }
    c.max_len = j.value("max_len", c.max_len);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  return c;
}

}  // namespace spellscan::model
