#include <gtest/gtest.h>

#include <random>

#include "impactlag/stats.hpp"
#include "oracles.hpp"

using namespace impactlag;
using I64 = std::vector<std::int64_t>;

namespace {

template <typename T>
std::map<std::int64_t, double> as_map(const StepTable<T>& t) {
  std::map<std::int64_t, double> m;
  for (std::size_t i = 0; i < t.values.size(); ++i) m[t.values[i]] = t.probs[i];
  return m;
}

std::map<std::string, double> ids(const std::vector<double>& v) {
  std::map<std::string, double> m;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "id%04zu", i);
    m[buf] = v[i];
  }
  return m;
}

double rho(const std::vector<double>& x, const std::vector<double>& y) { return spearman_rank<double, double>(x, y); }

}  // namespace

TEST(Survival, Example) {
  I64 v{1, 1, 2};
  auto s = as_map(survival_function<std::int64_t>(v));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0 / 3.0);
}

TEST(Ecdf, Example) {
  I64 v{2, 2, 5};
  auto e = as_map(ecdf<std::int64_t>(v));
  EXPECT_DOUBLE_EQ(e[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(e[5], 1.0);
}

TEST(Survival, EmptyInput) {
  I64 v;
  EXPECT_THROW(survival_function<std::int64_t>(v), EmptyInput);
  EXPECT_THROW(ecdf<std::int64_t>(v), EmptyInput);
}

TEST(Survival, MatchesOracleAndIsMonotone) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    I64 v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<std::int64_t>(rng() % 12) - 3;
    auto s = survival_function<std::int64_t>(v);
    auto e = ecdf<std::int64_t>(v);
    EXPECT_EQ(as_map(s), oracle::survival(v));
    EXPECT_EQ(as_map(e), oracle::ecdf(v));
    EXPECT_EQ(s.probs.front(), 1.0);
    EXPECT_EQ(e.probs.back(), 1.0);
    for (std::size_t k = 1; k < s.probs.size(); ++k) {
      EXPECT_LT(s.probs[k], s.probs[k - 1]);
      EXPECT_GT(e.probs[k], e.probs[k - 1]);
    }
  }
}

TEST(Spearman, MonotoneRelations) {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> up{10, 20, 30, 40, 50, 60}, down{60, 50, 40, 30, 20, 10}, cube;
  for (double v : x) cube.push_back(v * v * v - 7);
  EXPECT_DOUBLE_EQ(rho(x, up), 1.0);
  EXPECT_DOUBLE_EQ(rho(x, down), -1.0);
  EXPECT_DOUBLE_EQ(rho(x, cube), 1.0);
}

TEST(Spearman, Errors) {
  std::vector<double> a{1, 2, 3}, b{1, 2}, c{4, 4, 4};
  EXPECT_THROW((rho(a, b)), LengthMismatch);
  EXPECT_THROW((rho(b, b)), LengthMismatch);
  EXPECT_THROW((rho(a, c)), DegenerateVariance);
}

TEST(Spearman, MatchesOracleAndTransformInvariance) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(3 + rng() % 30), y(x.size());
    for (auto& v : x) v = static_cast<double>(rng() % 8);
    for (auto& v : y) v = static_cast<double>(rng() % 8);
    auto want = oracle::spearman(x, y);
    if (!want) {
      EXPECT_THROW((rho(x, y)), DegenerateVariance);
      continue;
    }
    const double r = rho(x, y);
    EXPECT_EQ(r, *want);
    std::vector<double> tx;
    for (double v : x) tx.push_back(std::exp(v) + 3.0);
    EXPECT_NEAR(rho(tx, y), r, 1e-12);
    EXPECT_NEAR(rho(y, x), r, 1e-12);
  }
}

TEST(Overlap, IdenticalAndDisjoint) {
  auto m = ids({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  for (double p : {1.0, 10.0, 35.0, 50.0}) EXPECT_EQ(topk_overlap(m, m, p).s, 1.0);
  auto rev = ids({10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  auto o = topk_overlap(m, rev, 20.0);
  EXPECT_EQ(o.size_P, 2u);
  EXPECT_EQ(o.shared, 0u);
  EXPECT_EQ(o.s, 0.0);
}

TEST(Overlap, TiesAtCutoffAreIncluded) {
  auto m = ids({5, 5, 5, 1, 1, 1, 1, 1, 1, 1});
  auto o = topk_overlap(m, m, 10.0);
  EXPECT_EQ(o.threshold_P, 5.0);
  EXPECT_EQ(o.size_P, 3u);
}

TEST(Overlap, Errors) {
  std::map<std::string, double> empty;
  EXPECT_THROW(topk_overlap(empty, empty, 5.0), EmptyUniverse);
  auto a = ids({1, 2, 3});
  auto b = ids({1, 2});
  EXPECT_THROW(topk_overlap(a, b, 5.0), LengthMismatch);
  EXPECT_THROW(topk_overlap(a, a, 0.0), InvalidArgument);
}

TEST(Overlap, MatchesOracleAndMonotoneInvariance) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> p(1 + rng() % 20), a(p.size());
    for (auto& v : p) v = static_cast<double>(rng() % 6);
    for (auto& v : a) v = static_cast<double>(rng() % 6);
    auto mp = ids(p), ma = ids(a);
    std::vector<double> tp;
    for (double v : p) tp.push_back(v * v * 3.0 + 1.0);
    auto mtp = ids(tp);
    for (double pct : {1.0, 5.0, 10.0, 25.0, 50.0, 99.0}) {
      auto o = topk_overlap(mp, ma, pct);
      EXPECT_EQ(o.s, oracle::overlap(mp, ma, pct));
      EXPECT_GE(o.s, 0.0);
      EXPECT_LE(o.s, 1.0);
      EXPECT_EQ(topk_overlap(mtp, ma, pct).s, o.s);
    }
  }
}

TEST(Heatmap, SinglePair) {
  std::vector<std::pair<std::int64_t, std::int64_t>> v{{9, 10}};
  auto h = heatmap_log(v, 4, 4);
  EXPECT_EQ(h.total(), 1);
  EXPECT_EQ(h.counts[0][0], 1);
  EXPECT_DOUBLE_EQ(h.x_edges.front(), 1.0);
  EXPECT_DOUBLE_EQ(h.x_edges.back(), 2.0);
}

TEST(Heatmap, EdgesAreRightOpenExceptLast) {
  // x = log10(C_A + 1) in {0, 1, 2}; two bins over [0, 2] put 1 in the upper bin
  std::vector<std::pair<std::int64_t, std::int64_t>> v{{0, 1}, {9, 1}, {99, 1}};
  auto h = heatmap_log(v, 2, 1);
  EXPECT_EQ(h.counts[0][0], 1);
  EXPECT_EQ(h.counts[1][0], 2);
}

TEST(Heatmap, ConservationAndErrors) {
  std::mt19937_64 rng(24);
  std::vector<std::pair<std::int64_t, std::int64_t>> v;
  for (int i = 0; i < 3000; ++i) v.emplace_back(rng() % 5000, 1 + rng() % 300);
  for (std::size_t bins : {1u, 3u, 10u}) EXPECT_EQ(heatmap_log(v, bins, bins).total(), 3000);
  v.emplace_back(4, 0);
  EXPECT_THROW(heatmap_log(v, 10, 10), NonPositiveCP);
  std::vector<std::pair<std::int64_t, std::int64_t>> none;
  EXPECT_THROW(heatmap_log(none, 10, 10), EmptyInput);
}

TEST(PowerLaw, ConstantSampleHasNoTail) {
  I64 v(500, 7);
  EXPECT_THROW(fit_power_law(v), InsufficientTail);
  I64 empty;
  EXPECT_THROW(fit_power_law(empty), EmptyInput);
  I64 zero{0, 1, 2};
  EXPECT_THROW(fit_power_law(zero), InvalidArgument);
}

TEST(PowerLaw, HurwitzZetaAgainstDirectSum) {
  for (double s : {1.5, 2.0, 2.9, 3.5}) {
    for (double q : {1.0, 4.0, 45.0}) {
      // direct sum to 1e6 plus the integral tail
      double sum = 0.0;
      const double N = 1e6;
      for (double k = 0; k < N; ++k) sum += std::pow(q + k, -s);
      sum += std::pow(q + N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(q + N, -s);
      EXPECT_NEAR(powerlaw_detail::hurwitz_zeta(s, q) / sum, 1.0, 1e-9) << s << " " << q;
    }
  }
  EXPECT_NEAR(powerlaw_detail::hurwitz_zeta(2.0, 1.0), M_PI * M_PI / 6.0, 1e-12);
}

TEST(PowerLaw, RecoversPlantedExponent) {
  auto v = sample_power_law(2.5, 5, 20000, 7);
  PowerLawOptions o;
  o.x_min_range = {{1, 20}};
  auto f = fit_power_law(v, o);
  EXPECT_NEAR(f.alpha, 2.5, 0.05);
  EXPECT_LE(f.x_min, 8);
  EXPECT_GE(f.x_min, 3);
  o.method = PowerLawMethod::Exact;
  EXPECT_NEAR(fit_power_law(v, o).alpha, 2.5, 0.05);
}

TEST(PowerLaw, ThreadCountDoesNotChangeTheFit) {
  auto v = sample_power_law(3.0, 2, 5000, 3);
  PowerLawOptions o;
  auto f1 = fit_power_law(v, o);
  o.threads = 8;
  auto f8 = fit_power_law(v, o);
  EXPECT_EQ(f1.alpha, f8.alpha);
  EXPECT_EQ(f1.x_min, f8.x_min);
  EXPECT_EQ(f1.ks, f8.ks);
}

TEST(PowerLaw, SamplerIsSeeded) {
  EXPECT_EQ(sample_power_law(2.0, 1, 100, 5), sample_power_law(2.0, 1, 100, 5));
  EXPECT_NE(sample_power_law(2.0, 1, 100, 5), sample_power_law(2.0, 1, 100, 6));
  for (auto x : sample_power_law(2.0, 4, 1000, 1)) EXPECT_GE(x, 4);
  EXPECT_THROW(sample_power_law(1.0, 1, 10, 1), InvalidArgument);
}
