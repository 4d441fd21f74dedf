#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impactlag {

inline constexpr int kDefaultHorizonYear = 2013;
inline constexpr int kMinRecordYear = 1800;
inline constexpr int kFirstGrantYear = 1976;

struct Author {
  std::string surname;
  std::string initials;  // uppercase letters, no periods
  friend bool operator==(const Author&, const Author&) = default;
};

enum class DocType { Article, Review, Note, Editorial, Letter, Other };

inline constexpr std::array<DocType, 6> kAllDocTypes = {
    DocType::Article, DocType::Review, DocType::Note,
    DocType::Editorial, DocType::Letter, DocType::Other};

inline std::string_view to_string(DocType t) {
  switch (t) {
    case DocType::Article: return "Article";
    case DocType::Review: return "Review";
    case DocType::Note: return "Note";
    case DocType::Editorial: return "Editorial";
    case DocType::Letter: return "Letter";
    case DocType::Other: return "Other";
  }
  return "Other";
}

inline std::optional<DocType> parse_doc_type(std::string_view s) {
  for (DocType t : kAllDocTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct BibRecord {
  std::string record_id;
  std::vector<Author> authors;
  std::string title;
  std::string journal_full;
  std::string journal_abbrev;
  std::string volume;
  std::optional<std::string> issue;
  std::string first_page;
  int year = 0;
  DocType doc_type = DocType::Article;
  std::vector<std::string> fields;

  // Journal grouping key for reports: the abbreviation when present.
  const std::string& journal_key() const { return journal_abbrev.empty() ? journal_full : journal_abbrev; }
};

struct PatentRecord {
  std::string patent_id;
  int grant_year = 0;
  std::vector<std::string> nprs;
};

struct CitationEdge {
  std::string citing_id;
  std::string cited_id;
  int year = 0;
  friend bool operator==(const CitationEdge&, const CitationEdge&) = default;
};

// Citation channel: patent citations (P) or paper citations (A).
enum class Channel { Patent, Paper };

inline std::string_view channel_tag(Channel c) { return c == Channel::Patent ? "P" : "A"; }

struct Corpus {
  std::map<std::string, BibRecord> records;
  std::map<std::string, PatentRecord> patents;
  std::vector<CitationEdge> edges;  // sorted by (citing, cited, year)
  int horizon_year = kDefaultHorizonYear;

  // Published totals: exact group-by counts over `records`. A record listed
  // under several fields counts once in each.
  std::map<std::string, std::int64_t> field_published;
  std::map<std::string, std::int64_t> journal_published;

  void recompute_totals() {
    field_published.clear();
    journal_published.clear();
    for (const auto& [id, rec] : records) {
      for (const auto& f : rec.fields) ++field_published[f];
      ++journal_published[rec.journal_key()];
    }
  }
};

}  // namespace impactlag
