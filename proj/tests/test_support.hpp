#pragma once

#include <filesystem>
#include <string>

#include "impactlag/impactlag.hpp"

namespace testsupport {

inline std::string src(const std::string& rel) { return std::string(IMPACTLAG_SOURCE_DIR) + "/" + rel; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("impactlag_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  impactlag::io::write_atomic(p, content);
}

inline impactlag::BibRecord record(std::string id, std::string journal, int year, std::string volume,
                                   std::string first_page, std::string surname, std::string initials = "",
                                   std::vector<std::string> fields = {"Biochemistry"}) {
  impactlag::BibRecord r;
  r.record_id = std::move(id);
  r.authors = {{std::move(surname), std::move(initials)}};
  r.title = "A study";
  r.journal_full = journal;
  r.journal_abbrev = journal;
  r.volume = std::move(volume);
  r.first_page = std::move(first_page);
  r.year = year;
  r.fields = std::move(fields);
  return r;
}

inline impactlag::Corpus corpus_of(const std::vector<impactlag::BibRecord>& recs) {
  impactlag::Corpus c;
  for (const auto& r : recs) c.records[r.record_id] = r;
  c.recompute_totals();
  return c;
}

}  // namespace testsupport
