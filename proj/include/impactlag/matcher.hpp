#pragma once

// Reference-to-record matching cascade:
//   1. whole-string resolver
//   2. exact lookup on (journal, year, volume, first page, lead author)
//   3. the five 4-field subsets, in a fixed drop order
// The first stage with exactly one candidate wins. A stage with two or more
// candidates stops the cascade as Ambiguous.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/ingest.hpp"
#include "impactlag/keys.hpp"
#include "impactlag/parallel.hpp"
#include "impactlag/parser.hpp"
#include "impactlag/text.hpp"

namespace impactlag {

// Normalized match fields. Strings are folded; author is "surname i".
struct MatchQuery {
  std::optional<std::string> journal;
  std::optional<int> year;
  std::optional<std::string> volume;
  std::optional<std::string> first_page;
  std::optional<std::string> author;

  friend bool operator==(const MatchQuery&, const MatchQuery&) = default;

  KeyTuple key_tuple() const {
    return {journal, year ? std::optional<std::string>(std::to_string(*year)) : std::nullopt, volume, first_page,
            author};
  }

  std::vector<std::string> missing() const {
    std::vector<std::string> out;
    auto t = key_tuple();
    for (std::size_t i = 0; i < kMatchFieldCount; ++i)
      if (!t[i] || t[i]->empty()) out.emplace_back(kMatchFieldNames[i]);
    return out;
  }
};

namespace match_detail {

inline std::optional<std::string> nonempty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

inline MatchQuery require_four(MatchQuery q) {
  auto missing = q.missing();
  if (missing.size() > 1) throw InsufficientFields(std::move(missing));
  return q;
}

}  // namespace match_detail

inline MatchQuery normalize_query(const ParsedReference& parsed, const JournalAliases& aliases = {}) {
  using match_detail::nonempty;
  MatchQuery q;
  if (parsed.journal) q.journal = nonempty(aliases.key(*parsed.journal));
  q.year = parsed.year;
  if (parsed.volume) q.volume = nonempty(text::fold_numeric(*parsed.volume));
  if (parsed.first_page) q.first_page = nonempty(text::fold_numeric(*parsed.first_page));
  if (!parsed.authors.empty())
    q.author = nonempty(author_key(parsed.authors.front().surname, parsed.authors.front().initials));
  return match_detail::require_four(std::move(q));
}

// Re-normalizes an existing query; normalize_query(normalize_query(q)) == normalize_query(q).
inline MatchQuery normalize_query(const MatchQuery& in, const JournalAliases& aliases = {}) {
  using match_detail::nonempty;
  MatchQuery q;
  if (in.journal) q.journal = nonempty(aliases.key(*in.journal));
  q.year = in.year;
  if (in.volume) q.volume = nonempty(text::fold_numeric(*in.volume));
  if (in.first_page) q.first_page = nonempty(text::fold_numeric(*in.first_page));
  if (in.author) {
    std::string_view a = *in.author;
    auto sp = a.find(' ');
    q.author = nonempty(sp == std::string_view::npos ? author_key(a, "") : author_key(a.substr(0, sp), a.substr(sp + 1)));
  }
  return match_detail::require_four(std::move(q));
}

enum class MatchOutcome { Matched, NoMatch, Ambiguous };

inline std::string_view to_string(MatchOutcome o) {
  switch (o) {
    case MatchOutcome::Matched: return "matched";
    case MatchOutcome::NoMatch: return "nomatch";
    case MatchOutcome::Ambiguous: return "ambiguous";
  }
  return "nomatch";
}

enum class StageKind { FullText, Fields5, Fields4 };

struct MatchStage {
  StageKind kind = StageKind::FullText;
  std::optional<MatchField> dropped;  // Fields4 only

  friend bool operator==(const MatchStage&, const MatchStage&) = default;

  std::string name() const {
    switch (kind) {
      case StageKind::FullText: return "full_text";
      case StageKind::Fields5: return "fields5";
      case StageKind::Fields4: return "fields4_drop_" + std::string(to_string(*dropped));
    }
    return "none";
  }
};

// One consulted stage: how many candidates it produced, or that it was skipped.
struct StageAttempt {
  MatchStage stage;
  std::size_t candidates = 0;
  bool skipped = false;  // resolver unavailable, or required fields missing
};

struct MatchResult {
  MatchOutcome outcome = MatchOutcome::NoMatch;
  std::vector<std::string> record_ids;  // 1 when Matched, >= 2 when Ambiguous
  std::optional<MatchStage> stage;      // the deciding stage
  std::vector<StageAttempt> audit;
  std::string diagnostic;               // error kind when parsing/normalizing failed

  bool matched() const { return outcome == MatchOutcome::Matched; }
  std::optional<std::string> record_id() const {
    if (!matched()) return std::nullopt;
    return record_ids.front();
  }
  std::string stage_name() const { return stage ? stage->name() : std::string("none"); }
};

using DropOrder = std::array<MatchField, kMatchFieldCount>;

inline constexpr DropOrder kDefaultDropOrder = {MatchField::Author, MatchField::FirstPage, MatchField::Volume,
                                                MatchField::Year, MatchField::Journal};

// Parses "author,first_page,volume,year,journal"; must name each field once.
inline DropOrder parse_drop_order(std::string_view spec) {
  DropOrder out{};
  std::array<bool, kMatchFieldCount> seen{};
  std::size_t n = 0;
  std::string s(spec);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto f = parse_match_field(text::trim(item));
    if (!f || n >= kMatchFieldCount || seen[static_cast<std::size_t>(*f)])
      throw ConfigInvalid("drop_order: bad entry '" + item + "'");
    seen[static_cast<std::size_t>(*f)] = true;
    out[n++] = *f;
  }
  if (n != kMatchFieldCount) throw ConfigInvalid("drop_order must list all five fields");
  return out;
}

struct MatcherOptions {
  DropOrder drop_order = kDefaultDropOrder;
  ParserOptions parser;
};

class Matcher {
public:
  Matcher(const BibIndex& index, const Resolver* resolver = nullptr, MatcherOptions opts = {})
      : index_(&index), resolver_(resolver), opts_(opts), parser_(opts.parser) {}

  MatchResult match(std::string_view raw) const {
    MatchResult r;
    if (resolver_) {
      MatchStage st{StageKind::FullText, std::nullopt};
      try {
        auto id = resolver_->resolve(raw);
        r.audit.push_back({st, id ? 1u : 0u, false});
        if (id) return decide(std::move(r), st, {*id});
      } catch (const ResolverUnavailable&) {
        r.audit.push_back({st, 0, true});
      }
    }

    MatchQuery q;
    try {
      q = normalize_query(parser_.parse(raw), index_->aliases());
    } catch (const Error& e) {
      r.diagnostic = e.kind();
      return r;
    }
    return match_query(q, std::move(r));
  }

  MatchResult match_query(const MatchQuery& q, MatchResult r = {}) const {
    auto tuple = q.key_tuple();
    {
      MatchStage st{StageKind::Fields5, std::nullopt};
      if (composite_key(tuple)) {
        auto hits = index_->lookup(tuple);
        r.audit.push_back({st, hits.size(), false});
        if (!hits.empty()) return decide(std::move(r), st, std::move(hits));
      } else {
        r.audit.push_back({st, 0, true});
      }
    }
    for (MatchField drop : opts_.drop_order) {
      MatchStage st{StageKind::Fields4, drop};
      if (!composite_key(tuple, drop)) {
        r.audit.push_back({st, 0, true});
        continue;
      }
      auto hits = index_->lookup(tuple, drop);
      r.audit.push_back({st, hits.size(), false});
      if (!hits.empty()) return decide(std::move(r), st, std::move(hits));
    }
    return r;
  }

private:
  static MatchResult decide(MatchResult r, MatchStage st, std::vector<std::string> ids) {
    r.outcome = ids.size() == 1 ? MatchOutcome::Matched : MatchOutcome::Ambiguous;
    r.record_ids = std::move(ids);
    r.stage = st;
    return r;
  }

  const BibIndex* index_;
  const Resolver* resolver_;
  MatcherOptions opts_;
  HeuristicParser parser_;
};

inline MatchResult match_reference(std::string_view raw, const BibIndex& index, const Resolver* resolver = nullptr,
                                   const MatcherOptions& opts = {}) {
  return Matcher(index, resolver, opts).match(raw);
}

// ---------------------------------------------------------------------------
// batch matching over a corpus' patents

struct PatentMatch {
  std::string patent_id;
  int grant_year = 0;
  std::size_t npr_index = 0;
  MatchResult result;
};

// Output order: patents by id, then NPR position; independent of `threads`.
inline std::vector<PatentMatch> match_patents(const Corpus& corpus, const Matcher& matcher, unsigned threads = 1) {
  std::vector<PatentMatch> jobs;
  for (const auto& [id, p] : corpus.patents)
    for (std::size_t i = 0; i < p.nprs.size(); ++i) jobs.push_back({id, p.grant_year, i, {}});
  auto results = parallel_map(jobs.size(), threads, [&](std::size_t k) {
    const auto& job = jobs[k];
    return matcher.match(corpus.patents.at(job.patent_id).nprs[job.npr_index]);
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) jobs[k].result = std::move(results[k]);
  return jobs;
}

inline nlohmann::ordered_json to_json(const PatentMatch& m) {
  auto id = m.result.record_id();
  nlohmann::ordered_json j;
  j["patent_id"] = m.patent_id;
  j["npr_index"] = m.npr_index;
  j["outcome"] = std::string(to_string(m.result.outcome));
  j["record_id"] = id ? nlohmann::ordered_json(*id) : nlohmann::ordered_json(nullptr);
  j["stage"] = m.result.stage_name();
  return j;
}

// Row of matches.jsonl as read back by later pipeline stages.
struct MatchRow {
  std::string patent_id;
  std::size_t npr_index = 0;
  MatchOutcome outcome = MatchOutcome::NoMatch;
  std::optional<std::string> record_id;
  std::string stage;
};

inline std::vector<MatchRow> load_matches(const std::string& path) {
  std::vector<MatchRow> out;
  io::for_each_jsonl(path, [&](const json& j, std::size_t line) {
    MatchRow r;
    try {
      r.patent_id = j.at("patent_id").get<std::string>();
      r.npr_index = j.at("npr_index").get<std::size_t>();
      auto o = j.at("outcome").get<std::string>();
      if (o == "matched") r.outcome = MatchOutcome::Matched;
      else if (o == "ambiguous") r.outcome = MatchOutcome::Ambiguous;
      else if (o == "nomatch") r.outcome = MatchOutcome::NoMatch;
      else throw MalformedLine(path, line, "unknown outcome '" + o + "'");
      if (j.contains("record_id") && j["record_id"].is_string()) r.record_id = j["record_id"].get<std::string>();
      r.stage = j.value("stage", "none");
    } catch (const json::exception& e) {
      throw MalformedLine(path, line, e.what());
    }
    if (r.outcome == MatchOutcome::Matched && !r.record_id) throw MalformedLine(path, line, "matched row without record_id");
    out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------------------
// evaluation

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

  std::size_t total() const { return tp + fp + fn + tn; }
  double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0; }
  double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0; }
};

// tp: matched, gold has the same id. fp: matched, gold differs or is absent.
// fn: not matched (incl. ambiguous), gold present. tn: not matched, gold absent.
inline ConfusionMatrix evaluate_matcher(const std::vector<std::pair<std::string, MatchResult>>& predictions,
                                        const std::vector<LabeledReference>& gold) {
  if (predictions.size() != gold.size())
    throw MisalignedCorpora(std::to_string(predictions.size()) + " predictions vs " + std::to_string(gold.size()) +
                            " gold items");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i].first != gold[i].raw) throw MisalignedCorpora("item " + std::to_string(i) + " differs in raw text");
    auto got = predictions[i].second.record_id();
    const auto& want = gold[i].gold_record_id;
    if (got) {
      (want && *want == *got ? cm.tp : cm.fp)++;
    } else {
      (want ? cm.fn : cm.tn)++;
    }
  }
  return cm;
}

}  // namespace impactlag
