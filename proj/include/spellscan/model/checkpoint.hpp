#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spellscan/model/model.hpp"

namespace spellscan::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to predict: the vocabulary travels with the weights so a
// checkpoint can never be paired with the wrong tokenizer.
struct Checkpoint {
  ModelConfig model;
  HeadConfig head;
  TrainConfig train;
  std::vector<std::string> vocab_pieces;
  Params params;
  std::vector<EpochMetrics> trace;
  Json extra = Json::object();  // free-form provenance (dataset manifest, paths)

  std::string vocab_hash() const;
  Vocabulary vocabulary() const;
};

// Layout: 8-byte magic, u32 version, u64 header length, JSON header, raw
// little-endian float64 tensors in declared order, u64 FNV-1a of all
// preceding bytes.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Also refuses a vocabulary whose hash differs from the checkpoint's.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary& expected);

}  // namespace spellscan::model
