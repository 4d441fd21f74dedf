#pragma once

// Pipeline stages behind the `impactlag` command: ingest, match, metrics,
// stats, report. Each stage reads the previous stage's files, writes its own
// atomically, and stamps every file with a header comment.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/http_resolver.hpp"
#include "impactlag/ingest.hpp"
#include "impactlag/jsonl.hpp"
#include "impactlag/matcher.hpp"
#include "impactlag/metrics.hpp"
#include "impactlag/parallel.hpp"
#include "impactlag/report.hpp"
#include "impactlag/stats.hpp"

#ifndef IMPACTLAG_VERSION
#define IMPACTLAG_VERSION "0.1.0"
#endif

namespace impactlag::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string command;

  // inputs / outputs
  std::string patents, bib, citations;
  std::string corpus, aliases, resolver, matches, metrics;
  std::string out;

  std::optional<int> horizon_year;  // default: corpus manifest, else 2013
  unsigned threads = default_thread_count();
  bool dry_run = false;
  std::uint64_t seed = 0;
  bool lenient = false;

  // match
  std::string drop_order;  // empty: default order

  // stats
  std::vector<double> percentiles;  // empty: 1..50
  std::string xmin_range;           // "A:B"
  std::size_t min_tail = 50;
  bool exact_fit = false;
  std::size_t heatmap_bins = 10;

  // report
  bool cohort_patent_cited = true;
  std::optional<int> cohort_min_year;
  bool cohort_paper_cited = false;
  std::size_t top_journals = 10;

  // sample
  double alpha = 2.5;
  std::int64_t x_min = 1;
  std::size_t n = 1000;
};

// ---------------------------------------------------------------------------
// headers, hashing, formatting

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Parameters that shape output content. Paths, thread count and dry-run do
// not, so they stay out of the hash.
inline std::string canonical_params(const RunConfig& c, int horizon) {
  std::ostringstream s;
  s << "command=" << c.command << ";horizon=" << horizon << ";seed=" << c.seed << ";lenient=" << c.lenient;
  if (c.command == "match") s << ";drop_order=" << c.drop_order << ";resolver=" << !c.resolver.empty();
  if (c.command == "stats") {
    s << ";percentiles=";
    for (double p : c.percentiles) s << fmt_real(p) << ",";
    s << ";xmin_range=" << c.xmin_range << ";min_tail=" << c.min_tail << ";exact=" << c.exact_fit
      << ";bins=" << c.heatmap_bins;
  }
  if (c.command == "report") {
    s << ";cohort=" << c.cohort_patent_cited << "," << (c.cohort_min_year ? *c.cohort_min_year : 0) << ","
      << c.cohort_paper_cited << ";top=" << c.top_journals;
  }
  if (c.command == "sample") s << ";alpha=" << fmt_real(c.alpha) << ";x_min=" << c.x_min << ";n=" << c.n;
  return s.str();
}

inline std::string header_line(const RunConfig& c, int horizon) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# impactlag %s config=%016" PRIx64 " seed=%" PRIu64 "\n", IMPACTLAG_VERSION,
                fnv1a(canonical_params(c, horizon)), c.seed);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Collects outputs; on commit writes them atomically unless dry-running.
class Outputs {
public:
  explicit Outputs(bool dry_run) : dry_(dry_run) {}
  void put(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  void commit() const {
    if (dry_) return;
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      io::write_atomic(path, content);
    }
  }
  const std::vector<std::pair<fs::path, std::string>>& files() const { return files_; }

private:
  bool dry_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

// ---------------------------------------------------------------------------
// inputs

inline void require_file(const std::string& path, const std::string& artifact) {
  if (path.empty()) throw ConfigInvalid(artifact + ": no path given");
  if (!fs::is_regular_file(path)) throw MissingArtifact(artifact + ": " + path + " not found");
}

inline std::optional<int> manifest_horizon(const fs::path& dir) {
  auto m = dir / "manifest.jsonl";
  if (!fs::is_regular_file(m)) return std::nullopt;
  std::optional<int> h;
  io::for_each_jsonl(m.string(), [&](const json& j, std::size_t) {
    if (j.contains("horizon_year")) h = j["horizon_year"].get<int>();
  });
  return h;
}

inline int resolve_horizon(const RunConfig& c, const std::optional<int>& from_manifest) {
  if (c.horizon_year && from_manifest && *c.horizon_year != *from_manifest)
    throw ConfigInvalid("horizon_year " + std::to_string(*c.horizon_year) + " differs from corpus manifest (" +
                        std::to_string(*from_manifest) + ")");
  if (c.horizon_year) return *c.horizon_year;
  if (from_manifest) return *from_manifest;
  return kDefaultHorizonYear;
}

inline Corpus load_corpus_stage(const RunConfig& c, int& horizon) {
  if (c.corpus.empty()) throw ConfigInvalid("corpus: no directory given");
  CorpusPaths p{c.corpus};
  require_file(p.bib().string(), "corpus");
  require_file(p.patents().string(), "corpus");
  require_file(p.citations().string(), "corpus");
  horizon = resolve_horizon(c, manifest_horizon(c.corpus));
  LoadOptions opts;
  opts.horizon_year = horizon;
  opts.strict = !c.lenient;
  auto loaded = load_corpus_dir(c.corpus, opts);
  for (const auto& d : loaded.report.diagnostics) std::cerr << d << "\n";
  return std::move(loaded.corpus);
}

inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw ConfigInvalid("");
    std::size_t used = 0;
    auto a = std::stoll(s.substr(0, colon), &used);
    if (used != colon) throw ConfigInvalid("");
    auto b = std::stoll(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1 || a < 1 || b < a) throw ConfigInvalid("");
    return {a, b};
  } catch (const std::exception&) {
    throw ConfigInvalid("xmin_range: expected A:B with 1 <= A <= B, got '" + s + "'");
  }
}

// ---------------------------------------------------------------------------
// stages

inline int cmd_ingest(const RunConfig& c) {
  require_file(c.patents, "patents");
  require_file(c.bib, "bib");
  require_file(c.citations, "citations");
  if (c.out.empty()) throw ConfigInvalid("out: no directory given");
  const int horizon = c.horizon_year.value_or(kDefaultHorizonYear);
  LoadOptions opts;
  opts.horizon_year = horizon;
  opts.strict = !c.lenient;
  auto loaded = load_corpus(c.patents, c.bib, c.citations, opts);
  const auto& rep = loaded.report;
  for (const auto& d : rep.diagnostics) std::cerr << d << "\n";

  const auto header = header_line(c, horizon);
  auto dump = dump_corpus(loaded.corpus, header);
  CorpusPaths p{c.out};
  Outputs outs(c.dry_run);
  outs.put(p.patents(), std::move(dump.patents));
  outs.put(p.bib(), std::move(dump.bib));
  outs.put(p.citations(), std::move(dump.citations));
  nlohmann::ordered_json m;
  m["horizon_year"] = horizon;
  m["records"] = rep.records;
  m["patents"] = rep.patents;
  m["edges"] = rep.edges;
  m["rejected"] = rep.rejected();
  m["dropped_edges"] = rep.dropped_edges;
  m["patents_without_nprs"] = rep.patents_without_nprs;
  outs.put(fs::path(c.out) / "manifest.jsonl", header + m.dump() + "\n");
  outs.commit();
  std::cerr << "ingest: " << rep.records << " records, " << rep.patents << " patents, " << rep.edges << " edges ("
            << rep.rejected() << " rejected, " << rep.dropped_edges << " dropped)\n";
  return 0;
}

inline int cmd_match(const RunConfig& c) {
  int horizon = 0;
  auto corpus = load_corpus_stage(c, horizon);
  require_file(c.aliases, "aliases");
  if (c.out.empty()) throw ConfigInvalid("out: no file given");
  auto aliases = JournalAliases::load(c.aliases);
  auto index = BibIndex::build(corpus, aliases);

  std::unique_ptr<Resolver> resolver;
  if (c.resolver.rfind("http://", 0) == 0 || c.resolver.rfind("https://", 0) == 0) {
    resolver = std::make_unique<HttpResolver>(c.resolver);
  } else if (!c.resolver.empty()) {
    require_file(c.resolver, "resolver");
    resolver = std::make_unique<FileResolver>(FileResolver::load(c.resolver));
  }
  MatcherOptions mopts;
  if (!c.drop_order.empty()) mopts.drop_order = parse_drop_order(c.drop_order);
  mopts.parser.horizon_year = horizon;
  Matcher matcher(index, resolver.get(), mopts);

  auto results = match_patents(corpus, matcher, c.threads);
  std::string body = header_line(c, horizon);
  std::map<MatchOutcome, std::size_t> counts;
  for (const auto& m : results) {
    body += to_json(m).dump() + "\n";
    ++counts[m.result.outcome];
  }
  Outputs outs(c.dry_run);
  outs.put(c.out, std::move(body));
  outs.commit();
  std::cerr << "match: " << results.size() << " references, " << counts[MatchOutcome::Matched] << " matched, "
            << counts[MatchOutcome::Ambiguous] << " ambiguous, " << counts[MatchOutcome::NoMatch] << " unmatched\n";
  return 0;
}

inline int cmd_metrics(const RunConfig& c) {
  int horizon = 0;
  auto corpus = load_corpus_stage(c, horizon);
  require_file(c.matches, "matches");
  if (c.out.empty()) throw ConfigInvalid("out: no file given");
  auto matches = load_matches(c.matches);
  auto rows = compute_metrics(corpus, matches, c.threads);
  std::string body = header_line(c, horizon);
  std::size_t dropped = 0;
  for (const auto& pm : rows) {
    body += to_json(pm.row()).dump() + "\n";
    dropped += pm.dropped_patent + pm.dropped_paper;
  }
  Outputs outs(c.dry_run);
  outs.put(c.out, std::move(body));
  outs.commit();
  std::cerr << "metrics: " << rows.size() << " papers";
  if (dropped) std::cerr << ", " << dropped << " citation events outside [pub year, horizon] ignored";
  std::cerr << "\n";
  return 0;
}

namespace stats_detail {

template <typename T>
std::string step_csv(const std::string& header, const char* col, const std::vector<T>& sample, bool survival) {
  std::string out = header + "value," + col + "\n";
  if (sample.empty()) return out;
  auto t = survival ? survival_function<T>(sample) : ecdf<T>(sample);
  for (std::size_t i = 0; i < t.values.size(); ++i)
    out += std::to_string(t.values[i]) + "," + fmt_real(t.probs[i]) + "\n";
  return out;
}

inline std::string fit_row(const char* channel, const std::vector<std::int64_t>& sample, const PowerLawOptions& o) {
  try {
    auto f = fit_power_law(sample, o);
    return std::string(channel) + "," + fmt_real(f.alpha) + "," + std::to_string(f.x_min) + "," + fmt_real(f.ks) +
           "," + std::to_string(f.n_tail) + "\n";
  } catch (const InsufficientTail& e) {
    std::cerr << "stats: channel " << channel << ": " << e.what() << "\n";
  } catch (const EmptyInput& e) {
    std::cerr << "stats: channel " << channel << ": " << e.what() << "\n";
  }
  return std::string(channel) + ",NA,NA,NA," + std::to_string(sample.size()) + "\n";
}

}  // namespace stats_detail

inline int cmd_stats(const RunConfig& c) {
  using namespace stats_detail;
  require_file(c.metrics, "metrics");
  if (c.out.empty()) throw ConfigInvalid("out: no directory given");
  auto rows = load_metrics(c.metrics);

  std::vector<double> grid = c.percentiles;
  if (grid.empty())
    for (int p = 1; p <= 50; ++p) grid.push_back(p);
  for (double p : grid)
    if (!(p > 0.0 && p < 100.0)) throw ConfigInvalid("percentiles: " + fmt_real(p) + " outside (0, 100)");
  PowerLawOptions popts;
  if (!c.xmin_range.empty()) popts.x_min_range = parse_range(c.xmin_range);
  popts.min_tail = c.min_tail;
  popts.method = c.exact_fit ? PowerLawMethod::Exact : PowerLawMethod::Approximate;
  popts.threads = c.threads;
  if (c.heatmap_bins == 0) throw ConfigInvalid("heatmap_bins must be positive");

  const std::string header = header_line(c, 0);
  const fs::path out(c.out);
  Outputs outs(c.dry_run);

  std::vector<std::int64_t> cp, ca;
  for (const auto& r : rows) {
    if (r.C_P >= 1) cp.push_back(r.C_P);
    if (r.C_A >= 1) ca.push_back(r.C_A);
  }
  outs.put(out / "survival_P.csv", step_csv(header, "survival", cp, true));
  outs.put(out / "survival_A.csv", step_csv(header, "survival", ca, true));
  outs.put(out / "fit.csv", header + "channel,alpha,x_min,ks,n_tail\n" + fit_row("P", cp, popts) + fit_row("A", ca, popts));

  // overlap, heat map and correlation run over the patent-cited papers
  std::map<std::string, double> mp, ma;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::vector<std::int64_t> xs, ys;
  for (const auto& r : rows) {
    if (r.C_P < 1) continue;
    mp[r.record_id] = static_cast<double>(r.C_P);
    ma[r.record_id] = static_cast<double>(r.C_A);
    pairs.emplace_back(r.C_A, r.C_P);
    xs.push_back(r.C_P);
    ys.push_back(r.C_A);
  }
  std::string overlap = header + "percentile,s\n";
  if (!mp.empty())
    for (double p : grid) overlap += fmt_real(p) + "," + fmt_real(topk_overlap(mp, ma, p).s) + "\n";
  outs.put(out / "overlap.csv", std::move(overlap));

  std::string heat = header + "x_bin_lo,x_bin_hi,y_bin_lo,y_bin_hi,count\n";
  if (!pairs.empty()) {
    auto h = heatmap_log(pairs, c.heatmap_bins, c.heatmap_bins);
    for (std::size_t i = 0; i < c.heatmap_bins; ++i)
      for (std::size_t j = 0; j < c.heatmap_bins; ++j)
        heat += fmt_real(h.x_edges[i]) + "," + fmt_real(h.x_edges[i + 1]) + "," + fmt_real(h.y_edges[j]) + "," +
                fmt_real(h.y_edges[j + 1]) + "," + std::to_string(h.counts[i][j]) + "\n";
  }
  outs.put(out / "heatmap.csv", std::move(heat));

  std::string rho = "NA";
  try {
    rho = fmt_real(spearman_rank<std::int64_t, std::int64_t>(xs, ys));
  } catch (const LengthMismatch&) {
  } catch (const DegenerateVariance&) {
  }
  std::size_t dtm_neg = 0, dtm_zero = 0, dtm_pos = 0;
  for (const auto& r : rows) {
    if (!r.dt_m) continue;
    (*r.dt_m < 0 ? dtm_neg : *r.dt_m == 0 ? dtm_zero : dtm_pos)++;
  }
  outs.put(out / "summary.csv", header + "metric,value\n" + "papers," + std::to_string(rows.size()) + "\n" +
                                    "patent_cited," + std::to_string(mp.size()) + "\n" + "spearman_CP_CA," + rho +
                                    "\n" + "dt_m_negative," + std::to_string(dtm_neg) + "\n" + "dt_m_zero," +
                                    std::to_string(dtm_zero) + "\n" + "dt_m_positive," + std::to_string(dtm_pos) + "\n");

  const std::vector<std::pair<const char*, std::optional<int> MetricsRow::*>> params = {
      {"t_f_P", &MetricsRow::t_f_P}, {"t_f_A", &MetricsRow::t_f_A}, {"t_m_P", &MetricsRow::t_m_P},
      {"t_m_A", &MetricsRow::t_m_A}, {"tau_P", &MetricsRow::tau_P}, {"tau_A", &MetricsRow::tau_A},
      {"dt_f", &MetricsRow::dt_f},   {"dt_m", &MetricsRow::dt_m}};
  for (const auto& [name, member] : params) {
    std::vector<int> v;
    for (const auto& r : rows)
      if (r.*member) v.push_back(*(r.*member));
    outs.put(out / ("ecdf_" + std::string(name) + ".csv"), step_csv(header, "cdf", v, false));
  }
  outs.commit();
  std::cerr << "stats: " << rows.size() << " papers, " << mp.size() << " patent-cited\n";
  return 0;
}

inline int cmd_report(const RunConfig& c) {
  int horizon = 0;
  auto corpus = load_corpus_stage(c, horizon);
  require_file(c.metrics, "metrics");
  require_file(c.matches, "matches");
  if (c.out.empty()) throw ConfigInvalid("out: no directory given");
  auto metrics = index_metrics(load_metrics(c.metrics));
  auto matches = load_matches(c.matches);

  // metrics must be the ones computed from these matches
  auto events = collect_events(corpus, matches);
  for (const auto& [id, row] : metrics) {
    if (!corpus.records.count(id)) throw MisalignedCorpora("metrics row " + id + " is not in the corpus");
    auto it = events.patent.find(id);
    const auto n = it == events.patent.end() ? 0 : static_cast<std::int64_t>(it->second.size());
    if (n < row.C_P) throw MisalignedCorpora("metrics C_P for " + id + " exceeds its matched patents");
  }

  CohortSpec spec;
  spec.require_patent_cited = c.cohort_patent_cited;
  spec.min_pub_year = c.cohort_min_year;
  spec.require_paper_cited = c.cohort_paper_cited;
  auto cohort = filter_cohort(corpus, metrics, spec);

  const std::string header = header_line(c, horizon);
  const fs::path out(c.out);
  Outputs outs(c.dry_run);

  auto fields = field_stats(corpus, metrics, cohort);
  std::string fcsv = header + "field,n_cites,pct_cites,n_papers,pct_papers,pct_published\n";
  std::string jcsv = header + "field,journal,n_cites,pct_cites,n_papers,pct_papers,pct_published\n";
  for (const auto& f : fields) {
    fcsv += csv_field(f.field) + "," + std::to_string(f.n_cites) + "," + fmt_pct(f.pct_cites) + "," +
            std::to_string(f.n_papers) + "," + fmt_pct(f.pct_papers) + "," + fmt_pct(f.pct_published) + "\n";
    for (const auto& j : journal_stats(corpus, metrics, cohort, f.field, c.top_journals))
      jcsv += csv_field(j.field) + "," + csv_field(j.journal) + "," + std::to_string(j.n_cites) + "," +
              fmt_pct(j.pct_cites) + "," + std::to_string(j.n_papers) + "," + fmt_pct(j.pct_papers) + "," +
              fmt_pct(j.pct_published) + "\n";
  }
  std::string dcsv = header + "type,count,pct\n";
  for (const auto& d : doc_type_distribution(cohort, corpus))
    dcsv += std::string(to_string(d.type)) + "," + std::to_string(d.count) + "," + fmt_pct(d.pct) + "\n";

  outs.put(out / "field_stats.csv", std::move(fcsv));
  outs.put(out / "journal_stats.csv", std::move(jcsv));
  outs.put(out / "doc_types.csv", std::move(dcsv));
  outs.commit();
  std::cerr << "report: cohort of " << cohort.size() << " papers across " << fields.size() << " fields\n";
  return 0;
}

// Synthetic discrete power-law sample, one value per line.
inline int cmd_sample(const RunConfig& c) {
  if (c.out.empty()) throw ConfigInvalid("out: no file given");
  auto v = sample_power_law(c.alpha, c.x_min, c.n, c.seed);
  std::string body = header_line(c, 0);
  for (auto x : v) body += std::to_string(x) + "\n";
  Outputs outs(c.dry_run);
  outs.put(c.out, std::move(body));
  outs.commit();
  return 0;
}

inline int run(const RunConfig& c) {
  if (c.threads == 0) throw ConfigInvalid("threads must be at least 1");
  if (c.command == "ingest") return cmd_ingest(c);
  if (c.command == "match") return cmd_match(c);
  if (c.command == "metrics") return cmd_metrics(c);
  if (c.command == "stats") return cmd_stats(c);
  if (c.command == "report") return cmd_report(c);
  if (c.command == "sample") return cmd_sample(c);
  throw ConfigInvalid("unknown command '" + c.command + "'");
}

// Exit code contract: 0 ok, 1 validation failure, 2 internal error.
inline int run_guarded(const RunConfig& c) {
  try {
    return run(c);
  } catch (const Error& e) {
    std::cerr << "impactlag " << c.command << ": " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "impactlag " << c.command << ": internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace impactlag::cli
