#pragma once

// Corpus-level statistics over per-paper metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/parallel.hpp"

namespace impactlag {

// ---------------------------------------------------------------------------
// survival function and ECDF

template <typename T>
struct StepTable {
  std::vector<T> values;  // distinct, ascending
  std::vector<double> probs;
};

// P(X >= x) at each distinct sample value.
template <typename T>
StepTable<T> survival_function(std::span<const T> sample) {
  if (sample.empty()) throw EmptyInput("survival_function: empty sample");
  std::vector<T> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  StepTable<T> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    out.values.push_back(v[i]);
    out.probs.push_back(static_cast<double>(v.size() - i) / n);
  }
  return out;
}

// P(X <= x) at each distinct sample value.
template <typename T>
StepTable<T> ecdf(std::span<const T> sample) {
  if (sample.empty()) throw EmptyInput("ecdf: empty sample");
  std::vector<T> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  StepTable<T> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.values.push_back(v[i]);
    out.probs.push_back(static_cast<double>(i + 1) / n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// discrete power law

enum class PowerLawMethod {
  // alpha = 1 + n / sum ln(x / (x_min - 0.5))
  Approximate,
  // maximizes the exact discrete likelihood, normalized by the Hurwitz zeta
  Exact,
};

struct PowerLawOptions {
  std::optional<std::pair<std::int64_t, std::int64_t>> x_min_range;  // inclusive
  std::size_t min_tail = 50;
  std::size_t max_candidates = 200;
  double candidate_quantile = 0.9;  // default scan: distinct values up to this quantile
  PowerLawMethod method = PowerLawMethod::Approximate;
  unsigned threads = 1;
};

struct PowerLawFit {
  double alpha = 0.0;
  std::int64_t x_min = 0;
  double ks = 0.0;
  std::size_t n_tail = 0;
};

namespace powerlaw_detail {

// zeta(s, q) = sum_{k>=0} (k + q)^-s, s > 1, q >= 1; Euler-Maclaurin tail.
inline double hurwitz_zeta(double s, double q) {
  constexpr int kDirect = 12;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(q + k, -s);
  const double a = q + kDirect;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Bernoulli corrections B2k / (2k)! * s(s+1)...(s+2k-2) * a^{-s-2k+1}
  static constexpr double b2k_over_fact[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
                                             1.0 / 47900160.0};
  double rising = s;  // s (s+1) ... (s + 2k - 2)
  double apow = std::pow(a, -s - 1.0);
  for (int k = 0; k < 5; ++k) {
    sum += b2k_over_fact[k] * rising * apow;
    rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
    apow /= a * a;
  }
  return sum;
}

inline double approx_alpha(std::span<const std::int64_t> tail, std::int64_t x_min) {
  const double shift = static_cast<double>(x_min) - 0.5;
  double s = 0.0;
  for (auto x : tail) s += std::log(static_cast<double>(x) / shift);
  return 1.0 + static_cast<double>(tail.size()) / s;
}

inline double exact_alpha(std::span<const std::int64_t> tail, std::int64_t x_min, double start) {
  double sum_log = 0.0;
  for (auto x : tail) sum_log += std::log(static_cast<double>(x));
  const double n = static_cast<double>(tail.size());
  const double q = static_cast<double>(x_min);
  auto nll = [&](double a) { return n * std::log(hurwitz_zeta(a, q)) + a * sum_log; };
  // golden-section search on a bracket around the approximate estimate
  double lo = std::max(1.0 + 1e-6, start - 1.0), hi = start + 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = nll(c), fd = nll(d);
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = nll(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = nll(d);
    }
  }
  return (lo + hi) / 2.0;
}

// Model CDF P(X <= x) for integer x >= x_min - 1.
struct ModelCdf {
  PowerLawMethod method;
  double alpha;
  std::int64_t x_min;
  double norm = 1.0;

  ModelCdf(PowerLawMethod m, double a, std::int64_t xm) : method(m), alpha(a), x_min(xm) {
    if (method == PowerLawMethod::Exact) norm = hurwitz_zeta(alpha, static_cast<double>(x_min));
  }

  double operator()(std::int64_t x) const {
    if (x < x_min) return 0.0;
    if (method == PowerLawMethod::Approximate)
      return 1.0 - std::pow((static_cast<double>(x) + 0.5) / (static_cast<double>(x_min) - 0.5), 1.0 - alpha);
    return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x + 1)) / norm;
  }
};

// KS distance between the empirical tail and the model, checked at every
// distinct tail value and just below it.
inline double ks_distance(std::span<const std::int64_t> tail, const ModelCdf& F) {
  const double n = static_cast<double>(tail.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < tail.size()) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    d = std::max(d, std::abs(below - F(tail[i] - 1)));
    d = std::max(d, std::abs(at - F(tail[i])));
    i = j;
  }
  return d;
}

}  // namespace powerlaw_detail

// Fits p(x) ~ x^-alpha for x >= x_min, scanning x_min candidates and keeping
// the one with the smallest KS distance (ties: smaller x_min).
inline PowerLawFit fit_power_law(std::span<const std::int64_t> sample, const PowerLawOptions& opts = {}) {
  using namespace powerlaw_detail;
  if (sample.empty()) throw EmptyInput("fit_power_law: empty sample");
  std::vector<std::int64_t> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  if (v.front() < 1) throw InvalidArgument("fit_power_law: values must be positive integers");

  std::int64_t hi_cut;
  std::int64_t lo_cut = 1;
  if (opts.x_min_range) {
    lo_cut = opts.x_min_range->first;
    hi_cut = opts.x_min_range->second;
  } else {
    auto k = static_cast<std::size_t>(std::ceil(opts.candidate_quantile * static_cast<double>(v.size())));
    hi_cut = v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
  }

  // candidate start offsets: first index of each distinct value in range
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    if (v[i] < lo_cut || v[i] > hi_cut) continue;
    if (v.size() - i < opts.min_tail) continue;
    if (v.back() == v[i]) continue;  // tail without spread
    starts.push_back(i);
  }
  if (starts.empty())
    throw InsufficientTail("no x_min candidate leaves " + std::to_string(opts.min_tail) + " tail points with spread");
  if (opts.max_candidates > 0 && starts.size() > opts.max_candidates) {
    std::vector<std::size_t> thinned;
    const std::size_t m = starts.size();
    for (std::size_t k = 0; k < opts.max_candidates; ++k) {
      std::size_t idx = opts.max_candidates == 1 ? 0 : k * (m - 1) / (opts.max_candidates - 1);
      if (thinned.empty() || thinned.back() != starts[idx]) thinned.push_back(starts[idx]);
    }
    starts.swap(thinned);
  }

  auto fits = parallel_map(starts.size(), opts.threads, [&](std::size_t k) {
    std::span<const std::int64_t> tail(v.data() + starts[k], v.size() - starts[k]);
    const std::int64_t xm = tail.front();
    double alpha = approx_alpha(tail, xm);
    if (opts.method == PowerLawMethod::Exact) alpha = exact_alpha(tail, xm, alpha);
    PowerLawFit f;
    f.alpha = alpha;
    f.x_min = xm;
    f.n_tail = tail.size();
    f.ks = ks_distance(tail, ModelCdf(opts.method, alpha, xm));
    return f;
  });
  // candidates are in ascending x_min order, so strict < keeps the smaller x_min on ties
  std::size_t best = 0;
  for (std::size_t k = 1; k < fits.size(); ++k)
    if (fits[k].ks < fits[best].ks) best = k;
  return fits[best];
}

// Discrete power-law sample by inverse transform of the continuous
// approximation: x = floor((x_min - 0.5) (1 - u)^(-1/(alpha-1)) + 0.5).
// Uniforms come from the top 53 bits of mt19937_64, so the sample is
// reproducible across standard libraries.
inline std::vector<std::int64_t> sample_power_law(double alpha, std::int64_t x_min, std::size_t n, std::uint64_t seed) {
  if (!(alpha > 1.0) || x_min < 1) throw InvalidArgument("sample_power_law: need alpha > 1 and x_min >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> out;
  out.reserve(n);
  const double shift = static_cast<double>(x_min) - 0.5;
  const double expo = -1.0 / (alpha - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    const double x = std::floor(shift * std::pow(1.0 - u, expo) + 0.5);
    out.push_back(x > 9.0e18 ? std::numeric_limits<std::int64_t>::max() : static_cast<std::int64_t>(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// rank correlation

// Average ranks (1-based); tied values share the mean of their positions.
template <typename T>
std::vector<double> average_ranks(std::span<const T> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && !(x[order[i]] < x[order[j + 1]])) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

// Pearson correlation, clamped to [-1, 1].
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateVariance("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

template <typename T, typename U>
double spearman_rank(std::span<const T> x, std::span<const U> y) {
  if (x.size() != y.size())
    throw LengthMismatch("spearman_rank: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.size() < 3) throw LengthMismatch("spearman_rank: need at least 3 pairs");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------
// top-percentile overlap

struct OverlapPoint {
  double percentile = 0.0;
  double threshold_P = 0.0;
  double threshold_A = 0.0;
  std::size_t size_P = 0, size_A = 0, shared = 0;
  double s = 0.0;  // shared / size_P
};

// Nearest-rank threshold for the top p percent: the k-th largest value with
// k = ceil(p n / 100), at least 1.
inline double top_percentile_threshold(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end(), std::greater<>());
  auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) / 100.0));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

// M^P / M^A: ids whose value is at or above their metric's threshold (ties
// at the cutoff included). s = |M^P & M^A| / |M^P|.
inline OverlapPoint topk_overlap(const std::map<std::string, double>& metric_P,
                                 const std::map<std::string, double>& metric_A, double p) {
  if (metric_P.empty()) throw EmptyUniverse("topk_overlap: no ids");
  if (!(p > 0.0 && p < 100.0)) throw InvalidArgument("topk_overlap: percentile must be in (0, 100)");
  if (metric_P.size() != metric_A.size() ||
      !std::equal(metric_P.begin(), metric_P.end(), metric_A.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; }))
    throw LengthMismatch("topk_overlap: metrics cover different ids");
  auto values = [](const std::map<std::string, double>& m) {
    std::vector<double> v;
    v.reserve(m.size());
    for (const auto& [id, x] : m) v.push_back(x);
    return v;
  };
  OverlapPoint o;
  o.percentile = p;
  o.threshold_P = top_percentile_threshold(values(metric_P), p);
  o.threshold_A = top_percentile_threshold(values(metric_A), p);
  auto a = metric_A.begin();
  for (auto it = metric_P.begin(); it != metric_P.end(); ++it, ++a) {
    const bool inP = it->second >= o.threshold_P;
    const bool inA = a->second >= o.threshold_A;
    o.size_P += inP;
    o.size_A += inA;
    o.shared += inP && inA;
  }
  o.s = static_cast<double>(o.shared) / static_cast<double>(o.size_P);
  return o;
}

// ---------------------------------------------------------------------------
// log-binned 2-D histogram

struct Histogram2D {
  std::vector<double> x_edges, y_edges;        // bins + 1 each, strictly increasing
  std::vector<std::vector<std::int64_t>> counts;  // [x_bin][y_bin]

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
};

// Equal-width edges over [lo, hi]; a zero-width range is widened to [lo, lo + 1].
inline std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
  if (!(hi > lo)) hi = lo + 1.0;
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  e[bins] = hi;
  return e;
}

// Bin of v: [e_i, e_{i+1}) with the last bin closed.
inline std::size_t bin_of(const std::vector<double>& edges, double v) {
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  auto idx = static_cast<std::size_t>(it - edges.begin());
  const std::size_t bins = edges.size() - 1;
  if (idx == 0) return 0;
  return std::min(idx - 1, bins - 1);
}

// Bins (log10(C_A + 1), log10(C_P)). Pairs are (C_A, C_P).
inline Histogram2D heatmap_log(std::span<const std::pair<std::int64_t, std::int64_t>> pairs, std::size_t x_bins,
                               std::size_t y_bins) {
  if (x_bins == 0 || y_bins == 0) throw InvalidArgument("heatmap_log: bin counts must be positive");
  if (pairs.empty()) throw EmptyInput("heatmap_log: no pairs");
  std::vector<double> xs, ys;
  xs.reserve(pairs.size());
  ys.reserve(pairs.size());
  for (const auto& [ca, cp] : pairs) {
    if (cp < 1) throw NonPositiveCP("heatmap_log: C_P must be >= 1");
    if (ca < 0) throw InvalidArgument("heatmap_log: C_A must be >= 0");
    xs.push_back(std::log10(static_cast<double>(ca) + 1.0));
    ys.push_back(std::log10(static_cast<double>(cp)));
  }
  Histogram2D h;
  h.x_edges = linear_edges(*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()), x_bins);
  h.y_edges = linear_edges(*std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end()), y_bins);
  h.counts.assign(x_bins, std::vector<std::int64_t>(y_bins, 0));
  for (std::size_t i = 0; i < xs.size(); ++i) ++h.counts[bin_of(h.x_edges, xs[i])][bin_of(h.y_edges, ys[i])];
  return h;
}

}  // namespace impactlag
