#include "spellscan/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "spellscan/errors.hpp"

namespace spellscan {

JsonlFile parse_jsonl(std::string_view content) {
  JsonlFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw FormatError(std::string("malformed record: ") + e.what(), line_no);
    }
    if (!value.is_object()) throw FormatError("record is not an object", line_no);
    if (line_no == 1 && value.size() == 1 && value.contains("header")) {
      out.header = std::move(value["header"]);
      continue;
    }
    out.records.push_back(std::move(value));
  }
  return out;
}

JsonlFile read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path));
}

std::string format_jsonl(const JsonlFile& file) {
  std::string out;
  if (file.header) {
    Json wrapped;
    wrapped["header"] = *file.header;
    out += wrapped.dump();
    out += '\n';
  }
  for (const auto& r : file.records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const JsonlFile& file) {
  write_file(path, format_jsonl(file));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace spellscan
