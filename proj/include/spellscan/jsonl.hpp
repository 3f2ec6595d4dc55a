#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace spellscan {

using Json = nlohmann::ordered_json;

// A line-delimited record file. An optional first line of the form
// {"header": {...}} carries provenance (resolved config, content hashes).
struct JsonlFile {
  std::optional<Json> header;
  std::vector<Json> records;
};

JsonlFile parse_jsonl(std::string_view content);
JsonlFile read_jsonl(const std::filesystem::path& path);
std::string format_jsonl(const JsonlFile& file);
void write_jsonl(const std::filesystem::path& path, const JsonlFile& file);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace spellscan
