#pragma once

// Normalized match keys shared by the bibliographic index and the matcher.

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <string_view>

#include "impactlag/error.hpp"
#include "impactlag/text.hpp"

namespace impactlag {

enum class MatchField { Journal = 0, Year = 1, Volume = 2, FirstPage = 3, Author = 4 };

inline constexpr std::size_t kMatchFieldCount = 5;

inline constexpr std::array<std::string_view, kMatchFieldCount> kMatchFieldNames = {
    "journal", "year", "volume", "first_page", "author"};

inline std::string_view to_string(MatchField f) { return kMatchFieldNames[static_cast<std::size_t>(f)]; }

inline std::optional<MatchField> parse_match_field(std::string_view s) {
  for (std::size_t i = 0; i < kMatchFieldCount; ++i)
    if (kMatchFieldNames[i] == s) return static_cast<MatchField>(i);
  return std::nullopt;
}

// Abbreviation -> canonical journal key. Lookups fold the input first, so
// "J. Biol. Chem." and "J Biol Chem" hit the same entry. Unknown journals
// fall back to their folded spelling.
class JournalAliases {
public:
  JournalAliases() = default;

  // Tab-separated `<abbrev>\t<canonical_key>` lines; blank and '#' lines skipped.
  static JournalAliases load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open alias table " + path);
    JournalAliases out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw MalformedLine(path, line_no, "expected <abbrev>\\t<canonical_key>");
      out.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
  }

  void add(std::string_view alias, std::string_view canonical) {
    auto a = text::fold(alias);
    auto c = text::fold(canonical);
    if (a.empty() || c.empty()) return;
    table_[a] = c;
    canonical_.insert(c);
  }

  // Canonical keys are fixed points, so key(key(j)) == key(j).
  std::string key(std::string_view journal) const {
    auto f = text::fold(journal);
    if (canonical_.count(f)) return f;
    auto it = table_.find(f);
    return it == table_.end() ? f : it->second;
  }

  std::size_t size() const { return table_.size(); }

private:
  std::map<std::string, std::string> table_;
  std::set<std::string> canonical_;
};

// Lead-author key: folded surname plus the first initial when known.
inline std::string author_key(std::string_view surname, std::string_view initials) {
  std::string k = text::fold(surname);
  for (char c : initials) {
    if (text::is_ascii_alpha(c)) {
      k.push_back(' ');
      k.push_back(text::ascii_lower(c));
      break;
    }
  }
  return k;
}

// Surname-only part of an author key.
inline std::string_view author_surname_key(std::string_view key) {
  auto sp = key.find(' ');
  return sp == std::string_view::npos ? key : key.substr(0, sp);
}

using KeyTuple = std::array<std::optional<std::string>, kMatchFieldCount>;

// Joins the tuple's fields, skipping `drop` when given. Returns nullopt when
// a required field is missing.
inline std::optional<std::string> composite_key(const KeyTuple& t, std::optional<MatchField> drop = std::nullopt) {
  std::string out;
  for (std::size_t i = 0; i < kMatchFieldCount; ++i) {
    if (drop && static_cast<std::size_t>(*drop) == i) continue;
    if (!t[i] || t[i]->empty()) return std::nullopt;
    out += *t[i];
    out.push_back('\x1f');
  }
  return out;
}

}  // namespace impactlag
