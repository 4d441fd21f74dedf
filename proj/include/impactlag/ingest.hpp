#pragma once

// Corpus loading, validation and persistence; the bibliographic lookup index;
// whole-string resolvers.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/jsonl.hpp"
#include "impactlag/keys.hpp"
#include "impactlag/text.hpp"
#include "impactlag/types.hpp"

namespace impactlag {

// ---------------------------------------------------------------------------
// JSON mapping

inline json to_json(const BibRecord& r) {
  json authors = json::array();
  for (const auto& a : r.authors) authors.push_back({{"surname", a.surname}, {"initials", a.initials}});
  json j = {
      {"record_id", r.record_id},
      {"authors", std::move(authors)},
      {"title", r.title},
      {"journal_full", r.journal_full},
      {"journal_abbrev", r.journal_abbrev},
      {"volume", r.volume},
      {"issue", r.issue ? json(*r.issue) : json(nullptr)},
      {"first_page", r.first_page},
      {"year", r.year},
      {"doc_type", std::string(to_string(r.doc_type))},
      {"fields", r.fields},
  };
  return j;
}

inline json to_json(const PatentRecord& p) {
  return {{"patent_id", p.patent_id}, {"grant_year", p.grant_year}, {"nprs", p.nprs}};
}

inline json to_json(const CitationEdge& e) {
  return {{"citing", e.citing_id}, {"cited", e.cited_id}, {"year", e.year}};
}

namespace detail {

inline std::string opt_string(const json& j, const char* key, const std::string& file, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw MalformedLine(file, line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

inline std::string req_string(const json& j, const char* key, const std::string& file, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
    throw MalformedLine(file, line, std::string("missing or empty string field '") + key + "'");
  return it->get<std::string>();
}

inline int req_int(const json& j, const char* key, const std::string& file, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw MalformedLine(file, line, std::string("missing integer field '") + key + "'");
  return it->get<int>();
}

inline std::vector<std::string> string_list(const json& j, const char* key, const std::string& file, std::size_t line) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw MalformedLine(file, line, std::string("field '") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw MalformedLine(file, line, std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline BibRecord bib_record_from_json(const json& j, const std::string& file = "<json>", std::size_t line = 0) {
  BibRecord r;
  r.record_id = detail::req_string(j, "record_id", file, line);
  if (auto it = j.find("authors"); it != j.end()) {
    if (!it->is_array()) throw MalformedLine(file, line, "field 'authors' must be an array");
    for (const auto& a : *it) {
      if (!a.is_object()) throw MalformedLine(file, line, "author entries must be objects");
      r.authors.push_back({detail::opt_string(a, "surname", file, line), detail::opt_string(a, "initials", file, line)});
    }
  }
  r.title = detail::opt_string(j, "title", file, line);
  r.journal_full = detail::opt_string(j, "journal_full", file, line);
  r.journal_abbrev = detail::opt_string(j, "journal_abbrev", file, line);
  r.volume = detail::opt_string(j, "volume", file, line);
  if (auto it = j.find("issue"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedLine(file, line, "field 'issue' must be a string or null");
    r.issue = it->get<std::string>();
  }
  r.first_page = detail::opt_string(j, "first_page", file, line);
  r.year = detail::req_int(j, "year", file, line);
  if (auto it = j.find("doc_type"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedLine(file, line, "field 'doc_type' must be a string");
    auto t = parse_doc_type(it->get<std::string>());
    if (!t) throw MalformedLine(file, line, "unknown doc_type '" + it->get<std::string>() + "'");
    r.doc_type = *t;
  } else {
    r.doc_type = DocType::Other;
  }
  r.fields = detail::string_list(j, "fields", file, line);
  return r;
}

inline PatentRecord patent_from_json(const json& j, const std::string& file = "<json>", std::size_t line = 0) {
  PatentRecord p;
  p.patent_id = detail::req_string(j, "patent_id", file, line);
  p.grant_year = detail::req_int(j, "grant_year", file, line);
  p.nprs = detail::string_list(j, "nprs", file, line);
  return p;
}

inline CitationEdge edge_from_json(const json& j, const std::string& file = "<json>", std::size_t line = 0) {
  return {detail::req_string(j, "citing", file, line), detail::req_string(j, "cited", file, line),
          detail::req_int(j, "year", file, line)};
}

// ---------------------------------------------------------------------------
// load / dump

struct LoadOptions {
  int horizon_year = kDefaultHorizonYear;
  // Strict: the first invalid line throws. Lenient: invalid lines are
  // rejected, counted, and described in the report.
  bool strict = true;
};

struct LoadReport {
  std::size_t records = 0, patents = 0, edges = 0;
  std::size_t rejected_records = 0, rejected_patents = 0, rejected_edges = 0;
  std::size_t dropped_edges = 0;          // unresolvable citing/cited key
  std::size_t patents_without_nprs = 0;  // kept, but flagged
  std::vector<std::string> diagnostics;

  std::size_t rejected() const { return rejected_records + rejected_patents + rejected_edges; }
};

struct LoadedCorpus {
  Corpus corpus;
  LoadReport report;
};

inline LoadedCorpus load_corpus(const std::string& patents_path, const std::string& bib_path,
                                const std::string& edges_path, const LoadOptions& opts = {}) {
  LoadedCorpus out;
  Corpus& c = out.corpus;
  LoadReport& rep = out.report;
  c.horizon_year = opts.horizon_year;

  auto guarded = [&](auto&& body, std::size_t& rejected) {
    try {
      body();
    } catch (const Error& e) {
      if (opts.strict) throw;
      ++rejected;
      rep.diagnostics.push_back(e.kind() + ": " + e.what());
    }
  };

  // Malformed JSON cannot be skipped line-by-line through for_each_jsonl, so
  // lenient mode parses lines itself.
  auto scan = [&](const std::string& path, std::size_t& rejected, auto&& handle) {
    if (opts.strict) {
      io::for_each_jsonl(path, handle);
      return;
    }
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      guarded([&] {
        auto j = json::parse(t, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw MalformedLine(path, line_no, "invalid JSON object");
        handle(j, line_no);
      }, rejected);
    }
  };

  scan(bib_path, rep.rejected_records, [&](const json& j, std::size_t line) {
    auto rec = bib_record_from_json(j, bib_path, line);
    if (rec.year < kMinRecordYear || rec.year > opts.horizon_year) throw YearOutOfRange(rec.record_id, rec.year);
    if (c.records.count(rec.record_id)) throw DuplicateKey(rec.record_id);
    auto id = rec.record_id;
    c.records.emplace(std::move(id), std::move(rec));
  });

  scan(patents_path, rep.rejected_patents, [&](const json& j, std::size_t line) {
    auto p = patent_from_json(j, patents_path, line);
    if (p.grant_year < kFirstGrantYear || p.grant_year > opts.horizon_year) throw YearOutOfRange(p.patent_id, p.grant_year);
    if (c.patents.count(p.patent_id)) throw DuplicateKey(p.patent_id);
    if (p.nprs.empty()) ++rep.patents_without_nprs;
    auto id = p.patent_id;
    c.patents.emplace(std::move(id), std::move(p));
  });

  scan(edges_path, rep.rejected_edges, [&](const json& j, std::size_t line) {
    auto e = edge_from_json(j, edges_path, line);
    if (!c.records.count(e.citing_id) || !c.records.count(e.cited_id)) {
      ++rep.dropped_edges;
      rep.diagnostics.push_back("warning: " + edges_path + ":" + std::to_string(line) +
                                ": dropped edge with unknown key " + e.citing_id + " -> " + e.cited_id);
      return;
    }
    c.edges.push_back(std::move(e));
  });

  std::sort(c.edges.begin(), c.edges.end(), [](const CitationEdge& a, const CitationEdge& b) {
    return std::tie(a.citing_id, a.cited_id, a.year) < std::tie(b.citing_id, b.cited_id, b.year);
  });
  c.recompute_totals();
  rep.records = c.records.size();
  rep.patents = c.patents.size();
  rep.edges = c.edges.size();
  return out;
}

// Canonical file names inside a corpus directory.
struct CorpusPaths {
  std::filesystem::path dir;
  std::filesystem::path patents() const { return dir / "patents.jsonl"; }
  std::filesystem::path bib() const { return dir / "bib.jsonl"; }
  std::filesystem::path citations() const { return dir / "citations.jsonl"; }
};

inline LoadedCorpus load_corpus_dir(const std::filesystem::path& dir, const LoadOptions& opts = {}) {
  CorpusPaths p{dir};
  return load_corpus(p.patents().string(), p.bib().string(), p.citations().string(), opts);
}

// Key-sorted JSONL renderings of the three corpus files.
struct CorpusDump {
  std::string patents, bib, citations;
};

inline CorpusDump dump_corpus(const Corpus& c, std::string_view header = {}) {
  CorpusDump d;
  auto line = [](const json& j) { return j.dump() + "\n"; };
  d.patents = d.bib = d.citations = std::string(header);
  for (const auto& [id, p] : c.patents) d.patents += line(to_json(p));
  for (const auto& [id, r] : c.records) d.bib += line(to_json(r));
  for (const auto& e : c.edges) d.citations += line(to_json(e));
  return d;
}

inline void write_corpus_dir(const Corpus& c, const std::filesystem::path& dir, std::string_view header = {}) {
  std::filesystem::create_directories(dir);
  auto d = dump_corpus(c, header);
  CorpusPaths p{dir};
  io::write_atomic(p.patents(), d.patents);
  io::write_atomic(p.bib(), d.bib);
  io::write_atomic(p.citations(), d.citations);
}

// ---------------------------------------------------------------------------
// bibliographic index

// Immutable after build(); safe for concurrent readers.
class BibIndex {
public:
  static BibIndex build(const Corpus& corpus, const JournalAliases& aliases = {}) {
    BibIndex ix;
    ix.aliases_ = aliases;
    ix.ids_.reserve(corpus.records.size());
    for (const auto& [id, rec] : corpus.records) ix.ids_.push_back(id);  // map order: sorted

    std::uint32_t ord = 0;
    for (const auto& [id, rec] : corpus.records) {
      std::set<std::string> toks;
      for (auto& t : record_tokens(rec)) toks.insert(std::move(t));
      for (const auto& t : toks) ix.postings_[t].push_back(ord);

      for (const auto& tuple : record_key_tuples(rec, aliases)) {
        if (auto k = composite_key(tuple)) ix.exact_[*k].push_back(ord);
        for (std::size_t d = 0; d < kMatchFieldCount; ++d)
          if (auto k = composite_key(tuple, static_cast<MatchField>(d))) ix.subset_[d][*k].push_back(ord);
      }
      ++ord;
    }
    auto dedupe = [](auto& table) {
      for (auto& [k, v] : table) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      }
    };
    dedupe(ix.postings_);
    dedupe(ix.exact_);
    for (auto& t : ix.subset_) dedupe(t);
    return ix;
  }

  std::size_t size() const { return ids_.size(); }
  const JournalAliases& aliases() const { return aliases_; }

  // Exact lookup on the full 5-tuple, or on the 4-tuple obtained by dropping
  // one field. Returns sorted record ids.
  std::vector<std::string> lookup(const KeyTuple& query, std::optional<MatchField> drop = std::nullopt) const {
    auto k = composite_key(query, drop);
    if (!k) return {};
    const auto& table = drop ? subset_[static_cast<std::size_t>(*drop)] : exact_;
    auto it = table.find(*k);
    return it == table.end() ? std::vector<std::string>{} : ids_of(it->second);
  }

  // Records whose token bag contains every significant query token.
  std::vector<std::string> lookup_tokens(const std::vector<std::string>& tokens) const {
    std::vector<const std::vector<std::uint32_t>*> lists;
    std::set<std::string> seen;
    for (const auto& t : tokens) {
      if (is_stop_token(t) || !seen.insert(t).second) continue;
      auto it = postings_.find(t);
      if (it == postings_.end()) return {};
      lists.push_back(&it->second);
    }
    if (lists.empty()) return {};
    std::sort(lists.begin(), lists.end(), [](auto* a, auto* b) { return a->size() < b->size(); });
    std::vector<std::uint32_t> acc = *lists.front();
    for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
      std::vector<std::uint32_t> next;
      std::set_intersection(acc.begin(), acc.end(), lists[i]->begin(), lists[i]->end(), std::back_inserter(next));
      acc.swap(next);
    }
    return ids_of(acc);
  }

  std::vector<std::string> lookup_text(std::string_view raw) const { return lookup_tokens(text::words(raw)); }

  // Full-text tokens of a record: authors, title, journal names, volume,
  // first page and year.
  static std::vector<std::string> record_tokens(const BibRecord& r) {
    std::vector<std::string> out;
    auto add = [&](std::string_view s) {
      for (auto& w : text::words(s)) out.push_back(std::move(w));
    };
    for (const auto& a : r.authors) {
      add(a.surname);
      add(a.initials);
    }
    add(r.title);
    add(r.journal_full);
    add(r.journal_abbrev);
    add(r.volume);
    if (r.issue) add(*r.issue);
    add(r.first_page);
    add(std::to_string(r.year));
    return out;
  }

  static bool is_stop_token(std::string_view t) {
    static const std::unordered_set<std::string_view> stop = {
        "et", "al", "vol", "no", "pp", "p", "and", "the", "of", "in", "a", "an", "for", "to",
        "with", "by", "on", "at", "from", "ed", "eds", "j"};
    return stop.count(t) > 0;
  }

  // All (journal, year, volume, first_page, author) tuples a record answers
  // to: each journal spelling's alias key, and the lead author both with and
  // without the first initial.
  static std::vector<KeyTuple> record_key_tuples(const BibRecord& r, const JournalAliases& aliases) {
    std::set<std::string> journals;
    for (const auto* j : {&r.journal_abbrev, &r.journal_full}) {
      auto k = aliases.key(*j);
      if (!k.empty()) journals.insert(k);
    }
    std::set<std::string> authors;
    if (!r.authors.empty()) {
      auto full = author_key(r.authors.front().surname, r.authors.front().initials);
      if (!full.empty()) {
        authors.insert(full);
        authors.insert(std::string(author_surname_key(full)));
      }
    }
    std::optional<std::string> year = std::to_string(r.year);
    auto nonempty = [](std::string s) { return s.empty() ? std::nullopt : std::optional<std::string>(std::move(s)); };
    auto volume = nonempty(text::fold_numeric(r.volume));
    auto page = nonempty(text::fold_numeric(r.first_page));

    std::vector<std::optional<std::string>> jopts(journals.begin(), journals.end());
    std::vector<std::optional<std::string>> aopts(authors.begin(), authors.end());
    if (jopts.empty()) jopts.push_back(std::nullopt);
    if (aopts.empty()) aopts.push_back(std::nullopt);
    std::vector<KeyTuple> out;
    for (const auto& j : jopts)
      for (const auto& a : aopts) out.push_back(KeyTuple{j, year, volume, page, a});
    return out;
  }

  // Stable textual rendering of the index contents (for determinism checks).
  std::string fingerprint() const {
    std::ostringstream os;
    auto emit = [&](std::string_view name, const auto& table) {
      std::map<std::string, std::vector<std::string>> sorted;
      for (const auto& [k, v] : table) sorted[k] = ids_of(v);
      for (const auto& [k, v] : sorted) {
        os << name << '|' << k << '|';
        for (const auto& id : v) os << id << ',';
        os << '\n';
      }
    };
    emit("tok", postings_);
    emit("exact", exact_);
    for (std::size_t d = 0; d < kMatchFieldCount; ++d) emit(kMatchFieldNames[d], subset_[d]);
    return os.str();
  }

private:
  using Table = std::unordered_map<std::string, std::vector<std::uint32_t>>;

  std::vector<std::string> ids_of(const std::vector<std::uint32_t>& ords) const {
    std::vector<std::string> out;
    out.reserve(ords.size());
    for (auto o : ords) out.push_back(ids_[o]);
    return out;
  }

  JournalAliases aliases_;
  std::vector<std::string> ids_;
  Table postings_;
  Table exact_;
  std::array<Table, kMatchFieldCount> subset_;
};

// ---------------------------------------------------------------------------
// whole-string resolution

// Resolves an entire reference string to one record id. Implementations
// return nullopt for "no match" and throw ResolverUnavailable only for
// transport failures.
class Resolver {
public:
  virtual ~Resolver() = default;
  virtual std::optional<std::string> resolve(std::string_view raw) const = 0;
};

// Fixture-backed resolver: exact (whitespace-trimmed) term -> record id.
class FileResolver final : public Resolver {
public:
  FileResolver() = default;

  static FileResolver load(const std::string& path) {
    FileResolver r;
    io::for_each_jsonl(path, [&](const json& j, std::size_t line) {
      auto term = detail::req_string(j, "term", path, line);
      auto id = detail::req_string(j, "record_id", path, line);
      r.add(term, id);
    });
    return r;
  }

  void add(std::string_view term, std::string_view record_id) {
    std::string key(text::trim(term));
    auto [it, inserted] = table_.emplace(key, std::string(record_id));
    if (!inserted && it->second != record_id) throw DuplicateKey(key);
  }

  std::optional<std::string> resolve(std::string_view raw) const override {
    auto it = table_.find(std::string(text::trim(raw)));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return table_.size(); }

private:
  std::map<std::string, std::string> table_;
};

// Whole-string search against the local index's token bags: resolves when
// exactly one record contains every significant token of the string.
class IndexResolver final : public Resolver {
public:
  explicit IndexResolver(const BibIndex& index) : index_(&index) {}
  std::optional<std::string> resolve(std::string_view raw) const override {
    auto hits = index_->lookup_text(raw);
    if (hits.size() != 1) return std::nullopt;
    return hits.front();
  }

private:
  const BibIndex* index_;
};

inline std::optional<std::string> resolve_remote(std::string_view raw, const Resolver& resolver) {
  return resolver.resolve(raw);
}

}  // namespace impactlag
