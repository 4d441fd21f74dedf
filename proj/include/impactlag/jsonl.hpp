#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "impactlag/error.hpp"
#include "impactlag/text.hpp"

namespace impactlag {

using json = nlohmann::json;

namespace io {

// Calls `fn(object, line_no)` for every non-blank, non-comment line.
// Lines beginning with '#' are header comments and are skipped; line numbers
// still count them.
inline void for_each_jsonl(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    json j;
    try {
      j = json::parse(t);
    } catch (const json::parse_error& e) {
      throw MalformedLine(path, line_no, e.what());
    }
    if (!j.is_object()) throw MalformedLine(path, line_no, "expected a JSON object");
    fn(j, line_no);
  }
}

// Writes `content` to `path` through a sibling temp file and a rename, so a
// reader never sees a partially written file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("IoError", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace io
}  // namespace impactlag
