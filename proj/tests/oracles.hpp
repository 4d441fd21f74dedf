#pragma once

// Brute-force reference implementations used to check the library. They
// favour obviousness over speed and share no code with include/.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Profile {
  bool cited = false;
  int t_f = -1, t_m = -1, t_h = -1, tau = -1;
  long long c_max = 0;
  bool I = false;
};

inline Profile profile(const std::vector<std::int64_t>& c) {
  Profile p;
  long long total = 0;
  for (auto x : c) total += x;
  if (total == 0) return p;
  p.cited = true;
  const int L = static_cast<int>(c.size()) - 1;
  for (int t = L; t >= 0; --t)
    if (c[t] > 0) p.t_f = t;  // last assignment wins: smallest t
  for (int t = 0; t <= L; ++t) {
    bool is_peak = true;
    for (int u = 0; u <= L; ++u)
      if (c[u] > c[t] || (c[u] == c[t] && u < t)) is_peak = false;
    if (is_peak) p.t_m = t;
  }
  p.c_max = c[p.t_m];
  for (int t = L; t > p.t_m; --t)
    if (2 * c[t] < p.c_max) {
      p.I = true;
      p.t_h = t;  // last assignment wins: smallest t
    }
  p.tau = p.I ? p.t_h - p.t_m : L - p.t_m;
  return p;
}

inline double beauty(const std::vector<std::int64_t>& c) {
  if (c.empty()) return 0.0;
  int tm = 0;
  for (int t = 1; t < static_cast<int>(c.size()); ++t)
    if (c[t] > c[tm]) tm = t;
  if (tm == 0) return 0.0;
  double sum = 0.0;
  for (int t = 0; t <= tm; ++t) {
    double line = static_cast<double>(c[tm] - c[0]) / static_cast<double>(tm) * static_cast<double>(t) +
                  static_cast<double>(c[0]);
    double ct = static_cast<double>(c[t]);
    sum += (line - ct) / (ct < 1.0 ? 1.0 : ct);
  }
  return sum;
}

// P(X >= x) for each distinct x, by counting.
inline std::map<std::int64_t, double> survival(const std::vector<std::int64_t>& v) {
  std::map<std::int64_t, double> out;
  for (auto x : v) {
    if (out.count(x)) continue;
    std::size_t k = 0;
    for (auto y : v) k += y >= x;
    out[x] = static_cast<double>(k) / static_cast<double>(v.size());
  }
  return out;
}

inline std::map<std::int64_t, double> ecdf(const std::vector<std::int64_t>& v) {
  std::map<std::int64_t, double> out;
  for (auto x : v) {
    if (out.count(x)) continue;
    std::size_t k = 0;
    for (auto y : v) k += y <= x;
    out[x] = static_cast<double>(k) / static_cast<double>(v.size());
  }
  return out;
}

// Rank = (#less) + (#equal + 1) / 2, by pairwise comparison.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r;
  for (double x : v) {
    std::size_t less = 0, equal = 0;
    for (double y : v) {
      less += y < x;
      equal += y == x;
    }
    r.push_back(static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0);
  }
  return r;
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  return r > 1 ? 1.0 : (r < -1 ? -1.0 : r);
}

// Top-p% set: the k = ceil(p n / 100) largest values, widened to every id
// tied with the k-th.
inline std::set<std::string> top_set(const std::map<std::string, double>& m, double p) {
  std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(m.size()) / 100.0));
  if (k < 1) k = 1;
  std::set<std::string> out;
  for (const auto& [id, v] : m) {
    std::size_t strictly_above = 0;
    for (const auto& [id2, w] : m) strictly_above += w > v;
    if (strictly_above < k) out.insert(id);
  }
  return out;
}

inline double overlap(const std::map<std::string, double>& P, const std::map<std::string, double>& A, double p) {
  auto mp = top_set(P, p), ma = top_set(A, p);
  std::size_t shared = 0;
  for (const auto& id : mp) shared += ma.count(id);
  return static_cast<double>(shared) / static_cast<double>(mp.size());
}

struct FieldRow {
  long long n_cites = 0, n_papers = 0;
  double pct_cites = 0, pct_papers = 0, pct_published = 0;
};

struct Paper {
  std::string id;
  std::vector<std::string> fields;
  long long cp = 0;
  bool in_cohort = false;
};

inline std::map<std::string, FieldRow> field_stats(const std::vector<Paper>& papers) {
  std::set<std::string> all_fields;
  for (const auto& p : papers) all_fields.insert(p.fields.begin(), p.fields.end());
  long long total_cites = 0, total_papers = 0;
  for (const auto& p : papers)
    if (p.in_cohort) {
      total_cites += p.cp;
      ++total_papers;
    }
  std::map<std::string, FieldRow> out;
  for (const auto& f : all_fields) {
    FieldRow r;
    long long published = 0;
    for (const auto& p : papers) {
      bool has = false;
      for (const auto& g : p.fields) has = has || g == f;
      if (!has) continue;
      ++published;
      if (!p.in_cohort) continue;
      r.n_cites += p.cp;
      r.n_papers += 1;
    }
    if (r.n_papers == 0) continue;
    r.pct_cites = total_cites ? static_cast<double>(r.n_cites) * 100.0 / static_cast<double>(total_cites) : 0.0;
    r.pct_papers = static_cast<double>(r.n_papers) * 100.0 / static_cast<double>(total_papers);
    r.pct_published = static_cast<double>(r.n_papers) * 100.0 / static_cast<double>(published);
    out[f] = r;
  }
  return out;
}

}  // namespace oracle
