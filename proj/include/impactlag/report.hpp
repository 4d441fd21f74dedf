#pragma once

// Cohort filters and group-by reports: document types, fields, journals.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/metrics.hpp"
#include "impactlag/types.hpp"

namespace impactlag {

struct CohortSpec {
  bool require_patent_cited = false;  // C_P >= 1
  std::optional<int> min_pub_year;
  bool require_paper_cited = false;   // C_A > 0
  std::optional<std::set<DocType>> doc_types;
  std::optional<std::set<std::string>> fields;

  bool any() const { return require_patent_cited || min_pub_year || require_paper_cited || doc_types || fields; }

  // Papers from 1976 on with at least one paper citation (the temporal cohort).
  static CohortSpec temporal(int min_year = kFirstGrantYear) {
    CohortSpec s;
    s.require_patent_cited = true;
    s.min_pub_year = min_year;
    s.require_paper_cited = true;
    return s;
  }
};

using MetricsById = std::map<std::string, MetricsRow>;

inline MetricsById index_metrics(const std::vector<MetricsRow>& rows) {
  MetricsById out;
  for (const auto& r : rows) out[r.record_id] = r;
  return out;
}

// Record ids satisfying every criterion, sorted. Records without a metrics
// row count as uncited.
inline std::vector<std::string> filter_cohort(const Corpus& corpus, const MetricsById& metrics, const CohortSpec& spec) {
  if (!spec.any()) throw InvalidCohort("cohort spec sets no criterion");
  std::vector<std::string> out;
  for (const auto& [id, rec] : corpus.records) {
    auto it = metrics.find(id);
    const std::int64_t cp = it == metrics.end() ? 0 : it->second.C_P;
    const std::int64_t ca = it == metrics.end() ? 0 : it->second.C_A;
    if (spec.require_patent_cited && cp < 1) continue;
    if (spec.require_paper_cited && ca <= 0) continue;
    if (spec.min_pub_year && rec.year < *spec.min_pub_year) continue;
    if (spec.doc_types && !spec.doc_types->count(rec.doc_type)) continue;
    if (spec.fields && std::none_of(rec.fields.begin(), rec.fields.end(),
                                    [&](const std::string& f) { return spec.fields->count(f) > 0; }))
      continue;
    out.push_back(id);
  }
  return out;
}

struct GroupStats {
  std::string field;
  std::string journal;  // empty for field rows
  std::int64_t n_cites = 0;
  double pct_cites = 0.0;
  std::int64_t n_papers = 0;
  double pct_papers = 0.0;
  double pct_published = 0.0;
};

namespace report_detail {

inline double pct(std::int64_t part, std::int64_t whole) {
  return whole > 0 ? static_cast<double>(part) * 100.0 / static_cast<double>(whole) : 0.0;
}

inline void sort_groups(std::vector<GroupStats>& rows) {
  std::sort(rows.begin(), rows.end(), [](const GroupStats& a, const GroupStats& b) {
    if (a.n_cites != b.n_cites) return a.n_cites > b.n_cites;
    if (a.field != b.field) return a.field < b.field;
    return a.journal < b.journal;
  });
}

inline std::int64_t patent_cites(const MetricsById& metrics, const std::string& id) {
  auto it = metrics.find(id);
  return it == metrics.end() ? 0 : it->second.C_P;
}

}  // namespace report_detail

// Per field: patent citations and distinct papers within the cohort, their
// shares of the whole-cohort totals, and the share of all corpus papers in
// the field that are in the cohort. A paper in several fields counts in each.
// Rows are ordered by n_cites descending, then field name.
inline std::vector<GroupStats> field_stats(const Corpus& corpus, const MetricsById& metrics,
                                           const std::vector<std::string>& cohort,
                                           const std::optional<std::set<std::string>>& universe = std::nullopt) {
  using namespace report_detail;
  std::map<std::string, GroupStats> by_field;
  std::int64_t total_cites = 0;
  const auto total_papers = static_cast<std::int64_t>(cohort.size());
  for (const auto& id : cohort) {
    const auto& rec = corpus.records.at(id);
    const auto cp = patent_cites(metrics, id);
    total_cites += cp;
    for (const auto& f : rec.fields) {
      if (universe ? !universe->count(f) : !corpus.field_published.count(f))
        throw UnknownField("field '" + f + "' of " + id + " is not in the field universe");
      auto& g = by_field[f];
      g.field = f;
      g.n_cites += cp;
      g.n_papers += 1;
    }
  }
  std::vector<GroupStats> rows;
  for (auto& [f, g] : by_field) {
    g.pct_cites = pct(g.n_cites, total_cites);
    g.pct_papers = pct(g.n_papers, total_papers);
    auto pub = corpus.field_published.find(f);
    g.pct_published = pct(g.n_papers, pub == corpus.field_published.end() ? 0 : pub->second);
    rows.push_back(g);
  }
  sort_groups(rows);
  return rows;
}

// Journals within one field. Shares are relative to the field's totals;
// pct_published is relative to the journal's corpus papers in that field.
inline std::vector<GroupStats> journal_stats(const Corpus& corpus, const MetricsById& metrics,
                                             const std::vector<std::string>& cohort, const std::string& field,
                                             std::optional<std::size_t> limit = std::nullopt) {
  using namespace report_detail;
  auto in_field = [&](const BibRecord& r) { return std::find(r.fields.begin(), r.fields.end(), field) != r.fields.end(); };
  std::map<std::string, std::int64_t> published;
  for (const auto& [id, rec] : corpus.records)
    if (in_field(rec)) ++published[rec.journal_key()];

  std::map<std::string, GroupStats> by_journal;
  std::int64_t field_cites = 0, field_papers = 0;
  for (const auto& id : cohort) {
    const auto& rec = corpus.records.at(id);
    if (!in_field(rec)) continue;
    const auto cp = patent_cites(metrics, id);
    field_cites += cp;
    field_papers += 1;
    auto& g = by_journal[rec.journal_key()];
    g.field = field;
    g.journal = rec.journal_key();
    g.n_cites += cp;
    g.n_papers += 1;
  }
  std::vector<GroupStats> rows;
  for (auto& [j, g] : by_journal) {
    g.pct_cites = pct(g.n_cites, field_cites);
    g.pct_papers = pct(g.n_papers, field_papers);
    g.pct_published = pct(g.n_papers, published[j]);
    rows.push_back(g);
  }
  sort_groups(rows);
  if (limit && rows.size() > *limit) rows.resize(*limit);
  return rows;
}

struct DocTypeShare {
  DocType type = DocType::Article;
  std::int64_t count = 0;
  double pct = 0.0;
};

// Counts and percentage shares for the document types present in the cohort,
// in Article, Review, Note, Editorial, Letter, Other order.
inline std::vector<DocTypeShare> doc_type_distribution(const std::vector<std::string>& cohort, const Corpus& corpus) {
  if (cohort.empty()) throw EmptyCohort("doc_type_distribution: empty cohort");
  std::map<DocType, std::int64_t> counts;
  for (const auto& id : cohort) ++counts[corpus.records.at(id).doc_type];
  std::vector<DocTypeShare> out;
  const auto n = static_cast<std::int64_t>(cohort.size());
  for (DocType t : kAllDocTypes) {
    auto it = counts.find(t);
    if (it == counts.end()) continue;
    out.push_back({t, it->second, report_detail::pct(it->second, n)});
  }
  return out;
}

}  // namespace impactlag
