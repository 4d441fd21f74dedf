#pragma once

// Per-paper yearly citation curves for the patent (P) and paper (A) channels,
// and the metrics computed from them.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/jsonl.hpp"
#include "impactlag/matcher.hpp"
#include "impactlag/parallel.hpp"
#include "impactlag/types.hpp"

namespace impactlag {

// c_t for t = 0..L, L = horizon - pub_year.
struct CitationCurve {
  std::string record_id;
  Channel channel = Channel::Patent;
  int pub_year = 0;
  int horizon = kDefaultHorizonYear;
  std::vector<std::int64_t> counts;

  int span_years() const { return horizon - pub_year; }  // L
};

struct CurveBuild {
  CitationCurve curve;
  std::size_t dropped = 0;  // events before pub_year or after the horizon
};

inline CurveBuild build_curve(std::span<const int> event_years, int pub_year, int horizon,
                              Channel channel = Channel::Patent, std::string record_id = {}) {
  if (pub_year > horizon)
    throw PubYearAfterHorizon("publication year " + std::to_string(pub_year) + " is after horizon " +
                              std::to_string(horizon));
  CurveBuild b;
  b.curve.record_id = std::move(record_id);
  b.curve.channel = channel;
  b.curve.pub_year = pub_year;
  b.curve.horizon = horizon;
  b.curve.counts.assign(static_cast<std::size_t>(horizon - pub_year) + 1, 0);
  for (int y : event_years) {
    if (y < pub_year || y > horizon) {
      ++b.dropped;
      continue;
    }
    ++b.curve.counts[static_cast<std::size_t>(y - pub_year)];
  }
  return b;
}

inline std::int64_t total_citations(std::span<const std::int64_t> counts) {
  std::int64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

inline std::int64_t total_citations(const CitationCurve& curve) { return total_citations(curve.counts); }

// Earliest index of the maximum.
inline std::size_t peak_index(std::span<const std::int64_t> counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

// Timing of the first citation (t_f) and of the peak (t_m), whether the curve
// later fell below half of the peak (I, first at t_h), and tau: years above
// half of the peak after t_m. All fields are empty for an uncited curve.
struct TemporalProfile {
  bool cited = false;
  std::optional<int> t_f;
  std::optional<int> t_m;
  std::optional<std::int64_t> c_max;
  std::optional<bool> I;
  std::optional<int> t_h;
  std::optional<int> tau;

  friend bool operator==(const TemporalProfile&, const TemporalProfile&) = default;
};

inline TemporalProfile temporal_profile(std::span<const std::int64_t> counts) {
  TemporalProfile p;
  if (counts.empty() || total_citations(counts) <= 0) return p;
  const int L = static_cast<int>(counts.size()) - 1;
  p.cited = true;
  for (int t = 0; t <= L; ++t) {
    if (counts[static_cast<std::size_t>(t)] > 0) {
      p.t_f = t;
      break;
    }
  }
  const int tm = static_cast<int>(peak_index(counts));
  const std::int64_t cmax = counts[static_cast<std::size_t>(tm)];
  p.t_m = tm;
  p.c_max = cmax;
  const double half = static_cast<double>(cmax) / 2.0;
  p.I = false;
  for (int t = tm + 1; t <= L; ++t) {
    if (static_cast<double>(counts[static_cast<std::size_t>(t)]) < half) {
      p.I = true;
      p.t_h = t;
      break;
    }
  }
  p.tau = *p.I ? *p.t_h - tm : L - tm;
  return p;
}

inline TemporalProfile temporal_profile(const CitationCurve& curve) { return temporal_profile(curve.counts); }

// Patent-minus-paper timing differences.
struct LagProfile {
  int delta_t_f = 0;
  int delta_t_m = 0;
  friend bool operator==(const LagProfile&, const LagProfile&) = default;
};

inline LagProfile lag_profile(const TemporalProfile& patent, const TemporalProfile& paper) {
  if (!patent.cited || !patent.t_f || !patent.t_m) throw UndefinedChannel("patent channel has no citations");
  if (!paper.cited || !paper.t_f || !paper.t_m) throw UndefinedChannel("paper channel has no citations");
  return {*patent.t_f - *paper.t_f, *patent.t_m - *paper.t_m};
}

struct BeautyScore {
  double B = 0.0;
  Channel channel = Channel::Patent;
};

// Beauty Coefficient. With l_t the straight line from (0, c_0) to (t_m, c_tm),
//   B = sum_{t=0}^{t_m} (l_t - c_t) / max(1, c_t),
// t_m the earliest peak. B = 0 when the peak is in the publication year.
inline double beauty_coefficient(std::span<const std::int64_t> counts) {
  if (counts.empty()) return 0.0;
  const std::size_t tm = peak_index(counts);
  if (tm == 0) return 0.0;
  const double c0 = static_cast<double>(counts[0]);
  const double slope = static_cast<double>(counts[tm] - counts[0]) / static_cast<double>(tm);
  double b = 0.0;
  for (std::size_t t = 0; t <= tm; ++t) {
    const double line = slope * static_cast<double>(t) + c0;
    const double c = static_cast<double>(counts[t]);
    b += (line - c) / std::max(1.0, c);
  }
  return b;
}

inline BeautyScore beauty_coefficient(const CitationCurve& curve) {
  return {beauty_coefficient(curve.counts), curve.channel};
}

// ---------------------------------------------------------------------------
// per-paper rows (metrics.jsonl)

struct MetricsRow {
  std::string record_id;
  std::int64_t C_P = 0;
  std::int64_t C_A = 0;
  std::optional<double> B_P, B_A;
  std::optional<int> t_f_P, t_f_A, t_m_P, t_m_A;
  std::optional<int> I_P, I_A;
  std::optional<int> tau_P, tau_A;
  std::optional<int> dt_f, dt_m;
};

struct PaperMetrics {
  std::string record_id;
  int pub_year = 0;
  CitationCurve patent, paper;
  std::size_t dropped_patent = 0, dropped_paper = 0;
  TemporalProfile profile_patent, profile_paper;
  std::optional<LagProfile> lag;

  MetricsRow row() const {
    MetricsRow r;
    r.record_id = record_id;
    r.C_P = total_citations(patent);
    r.C_A = total_citations(paper);
    if (profile_patent.cited) r.B_P = beauty_coefficient(patent.counts);
    if (profile_paper.cited) r.B_A = beauty_coefficient(paper.counts);
    r.t_f_P = profile_patent.t_f;
    r.t_f_A = profile_paper.t_f;
    r.t_m_P = profile_patent.t_m;
    r.t_m_A = profile_paper.t_m;
    if (profile_patent.I) r.I_P = *profile_patent.I ? 1 : 0;
    if (profile_paper.I) r.I_A = *profile_paper.I ? 1 : 0;
    r.tau_P = profile_patent.tau;
    r.tau_A = profile_paper.tau;
    if (lag) {
      r.dt_f = lag->delta_t_f;
      r.dt_m = lag->delta_t_m;
    }
    return r;
  }
};

// Citation events per record. Patent events are dated by grant year; a patent
// citing the same paper through several NPRs counts once.
struct CitationEvents {
  std::map<std::string, std::vector<int>> patent, paper;
};

inline CitationEvents collect_events(const Corpus& corpus, const std::vector<MatchRow>& matches) {
  CitationEvents ev;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& m : matches) {
    if (m.outcome != MatchOutcome::Matched || !m.record_id) continue;
    auto pit = corpus.patents.find(m.patent_id);
    if (pit == corpus.patents.end()) throw MissingArtifact("matches reference unknown patent " + m.patent_id);
    if (!corpus.records.count(*m.record_id)) continue;  // resolved outside the loaded corpus
    if (!seen.insert({m.patent_id, *m.record_id}).second) continue;
    ev.patent[*m.record_id].push_back(pit->second.grant_year);
  }
  for (const auto& e : corpus.edges) ev.paper[e.cited_id].push_back(e.year);
  return ev;
}

inline PaperMetrics paper_metrics(const BibRecord& rec, const CitationEvents& ev, int horizon) {
  static const std::vector<int> none;
  auto events = [&](const std::map<std::string, std::vector<int>>& m) -> const std::vector<int>& {
    auto it = m.find(rec.record_id);
    return it == m.end() ? none : it->second;
  };
  PaperMetrics pm;
  pm.record_id = rec.record_id;
  pm.pub_year = rec.year;
  auto p = build_curve(events(ev.patent), rec.year, horizon, Channel::Patent, rec.record_id);
  auto a = build_curve(events(ev.paper), rec.year, horizon, Channel::Paper, rec.record_id);
  pm.patent = std::move(p.curve);
  pm.paper = std::move(a.curve);
  pm.dropped_patent = p.dropped;
  pm.dropped_paper = a.dropped;
  pm.profile_patent = temporal_profile(pm.patent);
  pm.profile_paper = temporal_profile(pm.paper);
  if (pm.profile_patent.cited && pm.profile_paper.cited) pm.lag = lag_profile(pm.profile_patent, pm.profile_paper);
  return pm;
}

// One entry per corpus record, ordered by record id.
inline std::vector<PaperMetrics> compute_metrics(const Corpus& corpus, const std::vector<MatchRow>& matches,
                                                 unsigned threads = 1) {
  auto ev = collect_events(corpus, matches);
  std::vector<const BibRecord*> recs;
  recs.reserve(corpus.records.size());
  for (const auto& [id, r] : corpus.records) recs.push_back(&r);
  return parallel_map(recs.size(), threads,
                      [&](std::size_t i) { return paper_metrics(*recs[i], ev, corpus.horizon_year); });
}

inline nlohmann::ordered_json to_json(const MetricsRow& r) {
  auto opt = [](const auto& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["record_id"] = r.record_id;
  j["C_P"] = r.C_P;
  j["C_A"] = r.C_A;
  j["B_P"] = opt(r.B_P);
  j["B_A"] = opt(r.B_A);
  j["t_f_P"] = opt(r.t_f_P);
  j["t_f_A"] = opt(r.t_f_A);
  j["t_m_P"] = opt(r.t_m_P);
  j["t_m_A"] = opt(r.t_m_A);
  j["I_P"] = opt(r.I_P);
  j["I_A"] = opt(r.I_A);
  j["tau_P"] = opt(r.tau_P);
  j["tau_A"] = opt(r.tau_A);
  j["dt_f"] = opt(r.dt_f);
  j["dt_m"] = opt(r.dt_m);
  return j;
}

inline std::vector<MetricsRow> load_metrics(const std::string& path) {
  std::vector<MetricsRow> out;
  io::for_each_jsonl(path, [&](const json& j, std::size_t line) {
    MetricsRow r;
    auto opt_int = [&](const char* k) -> std::optional<int> {
      auto it = j.find(k);
      if (it == j.end() || it->is_null()) return std::nullopt;
      return it->get<int>();
    };
    auto opt_real = [&](const char* k) -> std::optional<double> {
      auto it = j.find(k);
      if (it == j.end() || it->is_null()) return std::nullopt;
      return it->get<double>();
    };
    try {
      r.record_id = j.at("record_id").get<std::string>();
      r.C_P = j.at("C_P").get<std::int64_t>();
      r.C_A = j.at("C_A").get<std::int64_t>();
      r.B_P = opt_real("B_P");
      r.B_A = opt_real("B_A");
      r.t_f_P = opt_int("t_f_P");
      r.t_f_A = opt_int("t_f_A");
      r.t_m_P = opt_int("t_m_P");
      r.t_m_A = opt_int("t_m_A");
      r.I_P = opt_int("I_P");
      r.I_A = opt_int("I_A");
      r.tau_P = opt_int("tau_P");
      r.tau_A = opt_int("tau_A");
      r.dt_f = opt_int("dt_f");
      r.dt_m = opt_int("dt_m");
    } catch (const json::exception& e) {
      throw MalformedLine(path, line, e.what());
    }
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace impactlag
