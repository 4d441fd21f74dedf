#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace impactlag::text {

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }
inline char ascii_lower(char c) { return is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

inline std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

// Lowercase ASCII letters and digits only; everything else is dropped.
// Idempotent: fold(fold(s)) == fold(s).
inline std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (is_ascii_alnum(c)) out.push_back(ascii_lower(c));
  return out;
}

// Strips leading zeros from an all-digit string ("0065" -> "65", "0" -> "0");
// other strings are folded.
inline std::string fold_numeric(std::string_view s) {
  std::string f = fold(s);
  if (!f.empty() && std::all_of(f.begin(), f.end(), is_ascii_digit)) {
    auto nz = f.find_first_not_of('0');
    return nz == std::string::npos ? std::string("0") : f.substr(nz);
  }
  return f;
}

// Lowercase alphanumeric word tokens.
inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_ascii_alnum(c)) {
      cur.push_back(ascii_lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace impactlag::text
