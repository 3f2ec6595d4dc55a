#include "spellscan/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "spellscan/errors.hpp"
#include "spellscan/hash.hpp"

namespace spellscan::model {

namespace {

constexpr std::string_view kMagic{"SPSCKPT\0", 8};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view b, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + static_cast<std::size_t>(i)]);
  return v;
}

std::uint32_t get_u32(std::string_view b, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + static_cast<std::size_t>(i)]);
  return v;
}

Json tensor_table(const Params& p) {
  Json t = Json::array();
  for (const auto& v : p.views()) t.push_back({{"name", v.name}, {"rows", v.rows}, {"cols", v.cols}});
  return t;
}

}  // namespace

std::string Checkpoint::vocab_hash() const { return Vocabulary(vocab_pieces).hash(); }

Vocabulary Checkpoint::vocabulary() const { return Vocabulary(vocab_pieces); }

std::string serialize_checkpoint(const Checkpoint& c) {
  Json header;
  header["format"] = "spellscan-checkpoint";
  header["version"] = kCheckpointVersion;
  header["model_config"] = to_json(c.model);
  header["head"] = to_json(c.head);
  header["train_config"] = to_json(c.train);
  header["vocab_hash"] = c.vocab_hash();
  header["vocab"] = c.vocab_pieces;
  Json trace = Json::array();
  for (const auto& m : c.trace) trace.push_back(to_json(m));
  header["trace"] = std::move(trace);
  header["extra"] = c.extra;
  header["tensors"] = tensor_table(c.params);
  const std::string header_text = header.dump();

  std::string out(kMagic);
  put_u32(out, kCheckpointVersion);
  put_u64(out, header_text.size());
  out += header_text;
  out.reserve(out.size() + c.params.count() * 8 + 8);
  for (const auto& v : c.params.views()) {
    for (Index i = 0; i < v.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(v.data[i]));
  }
  Fnv1a h;
  h.update(out);
  put_u64(out, h.value());
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  constexpr std::size_t kFixed = 8 + 4 + 8;
  if (bytes.size() < kFixed + 8 || bytes.substr(0, 8) != kMagic) throw CheckpointError("not a checkpoint file");
  Fnv1a h;
  h.update(bytes.substr(0, bytes.size() - 8));
  if (h.value() != get_u64(bytes, bytes.size() - 8)) throw CheckpointError("checkpoint checksum mismatch (corrupted)");
  const std::uint32_t version = get_u32(bytes, 8);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t header_len = get_u64(bytes, 12);
  if (header_len > bytes.size() - kFixed - 8) throw CheckpointError("checkpoint header overruns file");

  Checkpoint c;
  try {
    const Json header = Json::parse(bytes.substr(kFixed, header_len));
    c.model = model_config_from_json(header.at("model_config"));
    c.head = head_config_from_json(header.at("head"));
    c.train = train_config_from_json(header.at("train_config"));
    c.vocab_pieces = header.at("vocab").get<std::vector<std::string>>();
    for (const auto& m : header.at("trace")) c.trace.push_back(epoch_metrics_from_json(m));
    c.extra = header.at("extra");
    if (c.vocab_hash() != header.at("vocab_hash").get<std::string>()) {
      throw CheckpointError("embedded vocabulary does not match its recorded hash");
    }
    c.params = init_params<double>(c.model, 0);
    const Json& tensors = header.at("tensors");
    auto views = c.params.views();
    if (tensors.size() != views.size()) throw CheckpointError("tensor table does not match the model config");
    for (std::size_t k = 0; k < views.size(); ++k) {
      if (tensors[k].at("name").get<std::string>() != views[k].name ||
          tensors[k].at("rows").get<Index>() != views[k].rows || tensors[k].at("cols").get<Index>() != views[k].cols) {
        throw CheckpointError("tensor " + views[k].name + " has an unexpected shape");
      }
    }
  } catch (const Json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad checkpoint config: ") + e.what());
  } catch (const VocabError& e) {
    throw CheckpointError(std::string("bad checkpoint vocabulary: ") + e.what());
  }

  std::size_t pos = kFixed + header_len;
  if (bytes.size() - pos - 8 != c.params.count() * 8) throw CheckpointError("checkpoint tensor data has wrong size");
  for (auto& v : c.params.views()) {
    for (Index i = 0; i < v.size(); ++i, pos += 8) v.data[i] = std::bit_cast<double>(get_u64(bytes, pos));
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const InputError& e) {
    throw CheckpointError(e.what());
  }
  return deserialize_checkpoint(bytes);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary& expected) {
  Checkpoint c = load_checkpoint(path);
  const std::string have = c.vocab_hash();
  const std::string want = expected.hash();
  if (have != want) {
    throw CheckpointError("vocabulary hash mismatch: checkpoint " + have + ", vocabulary " + want);
  }
  return c;
}

}  // namespace spellscan::model
