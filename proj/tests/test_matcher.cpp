#include <gtest/gtest.h>

#include <random>
#include <thread>

#include <httplib.h>

#include "impactlag/http_resolver.hpp"
#include "impactlag/matcher.hpp"
#include "test_support.hpp"

using namespace impactlag;
using testsupport::record;

namespace {

class DownResolver final : public Resolver {
public:
  std::optional<std::string> resolve(std::string_view) const override {
    throw ResolverUnavailable("connection refused");
  }
};

JournalAliases jbc_aliases() {
  JournalAliases a;
  a.add("J. Biol. Chem.", "J Biol Chem");
  a.add("Journal of Biological Chemistry", "J Biol Chem");
  return a;
}

Corpus small_corpus() {
  return testsupport::corpus_of({
      record("R1", "J Biol Chem", 1951, "193", "265", "Lowry", "OH"),
      record("R2", "Science", 1990, "247", "1306", "Bowie", "JU"),
      // twins: same journal, year, volume and lead author
      record("T1", "Cell", 1995, "80", "100", "Smith", "A"),
      record("T2", "Cell", 1995, "80", "140", "Smith", "A"),
  });
}

bool stage_seen(const MatchResult& r, StageKind kind) {
  return std::any_of(r.audit.begin(), r.audit.end(), [&](const StageAttempt& a) { return a.stage.kind == kind; });
}

}  // namespace

TEST(NormalizeQuery, AliasAndFields) {
  ParsedReference p;
  p.journal = "J. Biol. Chem";
  p.year = 1951;
  p.volume = "193";
  p.first_page = "265";
  p.authors = {{"Lowry", "OH"}};
  auto q = normalize_query(p, jbc_aliases());
  EXPECT_EQ(q.journal, "jbiolchem");
  EXPECT_EQ(q.year, 1951);
  EXPECT_EQ(q.volume, "193");
  EXPECT_EQ(q.first_page, "265");
  EXPECT_EQ(q.author, "lowry o");
}

TEST(NormalizeQuery, InsufficientFieldsListsMissing) {
  ParsedReference p;
  p.journal = "Science";
  p.year = 1990;
  try {
    normalize_query(p);
    FAIL();
  } catch (const InsufficientFields& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"volume", "first_page", "author"}));
  }
}

TEST(NormalizeQuery, Idempotent) {
  auto aliases = jbc_aliases();
  MatchQuery q{"Journal of Biological Chemistry", 1951, "0193", "265", "Lowry O"};
  auto once = normalize_query(q, aliases);
  EXPECT_EQ(normalize_query(once, aliases), once);
  EXPECT_EQ(once.volume, "193");
  EXPECT_EQ(once.author, "lowry o");
}

TEST(Matcher, ResolverHitWinsFirst) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c, jbc_aliases());
  FileResolver res;
  res.add("some free text citation", "R2");
  auto r = match_reference("some free text citation", ix, &res);
  ASSERT_TRUE(r.matched());
  EXPECT_EQ(r.record_id(), "R2");
  EXPECT_EQ(r.stage_name(), "full_text");
}

TEST(Matcher, FiveFieldMatchSkipsFourFieldStages) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c, jbc_aliases());
  auto r = match_reference("Lowry OH, et al. J. Biol. Chem. 193 (1951) 265-275.", ix);
  ASSERT_TRUE(r.matched());
  EXPECT_EQ(r.record_id(), "R1");
  EXPECT_EQ(r.stage_name(), "fields5");
  EXPECT_FALSE(stage_seen(r, StageKind::Fields4));
}

TEST(Matcher, AuthorTypoFallsBackToDropAuthor) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c, jbc_aliases());
  auto r = match_reference("Lowrey OH, et al. J. Biol. Chem. 193 (1951) 265-275.", ix);
  ASSERT_TRUE(r.matched());
  EXPECT_EQ(r.record_id(), "R1");
  EXPECT_EQ(r.stage_name(), "fields4_drop_author");
  ASSERT_GE(r.audit.size(), 2u);
  EXPECT_EQ(r.audit[0].stage.kind, StageKind::Fields5);
  EXPECT_EQ(r.audit[0].candidates, 0u);
}

TEST(Matcher, TwinRecordsAreAmbiguous) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c);
  // wrong first page: only the drop-first-page subset hits, and it hits both twins
  auto r = match_reference("Smith A, et al. Cell 80 (1995) 120-125.", ix);
  EXPECT_EQ(r.outcome, MatchOutcome::Ambiguous);
  EXPECT_EQ(r.record_ids, (std::vector<std::string>{"T1", "T2"}));
  EXPECT_EQ(r.stage_name(), "fields4_drop_first_page");
  EXPECT_FALSE(r.record_id());
}

TEST(Matcher, AmbiguityStopsTheCascade) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c);
  auto r = match_reference("Smith A, et al. Cell 80 (1995) 120-125.", ix);
  // no stage after the ambiguous one was consulted
  EXPECT_EQ(r.audit.back().stage.name(), "fields4_drop_first_page");
}

TEST(Matcher, UnparseableReferenceIsNoMatchWithDiagnostic) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c);
  auto r = match_reference("http://example.com/manual.pdf", ix);
  EXPECT_EQ(r.outcome, MatchOutcome::NoMatch);
  EXPECT_EQ(r.diagnostic, "NoBibliographicContent");
  auto e = match_reference("", ix);
  EXPECT_EQ(e.diagnostic, "EmptyInput");
  auto i = match_reference("Smith A (1995)", ix);
  EXPECT_EQ(i.diagnostic, "InsufficientFields");
}

TEST(Matcher, ResolverOutageFallsThroughToLocalStages) {
  auto c = small_corpus();
  auto ix = BibIndex::build(c, jbc_aliases());
  DownResolver down;
  auto r = match_reference("Bowie JU, et al. Science 247 (1990) 1306-1310.", ix, &down);
  ASSERT_TRUE(r.matched());
  EXPECT_EQ(r.record_id(), "R2");
  ASSERT_FALSE(r.audit.empty());
  EXPECT_EQ(r.audit[0].stage.kind, StageKind::FullText);
  EXPECT_TRUE(r.audit[0].skipped);
}

TEST(Matcher, DropOrderIsConfigurable) {
  EXPECT_EQ(parse_drop_order("author,first_page,volume,year,journal"), kDefaultDropOrder);
  EXPECT_THROW(parse_drop_order("author,author,volume,year,journal"), ConfigInvalid);
  EXPECT_THROW(parse_drop_order("author,volume"), ConfigInvalid);
  auto c = small_corpus();
  auto ix = BibIndex::build(c, jbc_aliases());
  MatcherOptions o;
  o.drop_order = parse_drop_order("first_page,author,volume,year,journal");
  auto r = Matcher(ix, nullptr, o).match("Lowrey OH, et al. J. Biol. Chem. 193 (1951) 265-275.");
  EXPECT_EQ(r.audit[1].stage.name(), "fields4_drop_first_page");
  EXPECT_EQ(r.stage_name(), "fields4_drop_author");
}

TEST(Matcher, OutcomeIndependentOfIndexInsertionOrder) {
  auto base = load_corpus_dir(testsupport::src("data/mini")).corpus;
  auto aliases = JournalAliases::load(testsupport::src("data/journal_aliases.tsv"));
  std::vector<BibRecord> recs;
  for (const auto& [id, r] : base.records) recs.push_back(r);
  std::shuffle(recs.begin(), recs.end(), std::mt19937(3));
  auto shuffled = testsupport::corpus_of(recs);
  auto ix1 = BibIndex::build(base, aliases), ix2 = BibIndex::build(shuffled, aliases);
  Matcher m1(ix1), m2(ix2);
  for (const auto& item : load_labeled_refs(testsupport::src("data/labeled_refs.jsonl"))) {
    auto a = m1.match(item.raw), b = m2.match(item.raw);
    EXPECT_EQ(a.outcome, b.outcome);
    EXPECT_EQ(a.record_ids, b.record_ids);
  }
}

TEST(Matcher, BatchOutputIsThreadCountIndependent) {
  auto c = load_corpus_dir(testsupport::src("data/mini")).corpus;
  auto ix = BibIndex::build(c, JournalAliases::load(testsupport::src("data/journal_aliases.tsv")));
  Matcher m(ix);
  auto render = [](const std::vector<PatentMatch>& v) {
    std::string s;
    for (const auto& x : v) s += to_json(x).dump() + "\n";
    return s;
  };
  EXPECT_EQ(render(match_patents(c, m, 1)), render(match_patents(c, m, 8)));
}

TEST(MatchesFile, RoundTrip) {
  auto dir = testsupport::scratch("matches");
  testsupport::write(dir / "m.jsonl",
                     "# header\n"
                     R"({"patent_id":"US1","npr_index":0,"outcome":"matched","record_id":"R1","stage":"fields5"})"
                     "\n"
                     R"({"patent_id":"US1","npr_index":1,"outcome":"ambiguous","record_id":null,"stage":"fields4_drop_author"})"
                     "\n");
  auto rows = load_matches((dir / "m.jsonl").string());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].record_id, "R1");
  EXPECT_EQ(rows[1].outcome, MatchOutcome::Ambiguous);
  testsupport::write(dir / "bad.jsonl", R"({"patent_id":"US1","npr_index":0,"outcome":"matched","record_id":null})"
                                        "\n");
  EXPECT_THROW(load_matches((dir / "bad.jsonl").string()), MalformedLine);
}

// --- evaluation

TEST(EvaluateMatcher, AllCorrect) {
  std::vector<LabeledReference> gold;
  std::vector<std::pair<std::string, MatchResult>> pred;
  for (int i = 0; i < 5; ++i) {
    gold.push_back({"ref" + std::to_string(i), {}, "R" + std::to_string(i)});
    MatchResult r;
    r.outcome = MatchOutcome::Matched;
    r.record_ids = {"R" + std::to_string(i)};
    pred.push_back({gold.back().raw, r});
  }
  EXPECT_EQ(evaluate_matcher(pred, gold), (ConfusionMatrix{5, 0, 0, 0}));
}

TEST(EvaluateMatcher, AbstainingMatcher) {
  std::vector<LabeledReference> gold;
  std::vector<std::pair<std::string, MatchResult>> pred;
  for (int i = 0; i < 10; ++i) {
    std::optional<std::string> id;
    if (i % 3 == 0) id = "R" + std::to_string(i);
    gold.push_back({"ref" + std::to_string(i), {}, id});
    pred.push_back({gold.back().raw, MatchResult{}});
  }
  auto cm = evaluate_matcher(pred, gold);
  EXPECT_EQ(cm, (ConfusionMatrix{0, 0, 4, 6}));
  EXPECT_EQ(cm.total(), 10u);
}

TEST(EvaluateMatcher, WrongIdIsFalsePositiveAndAmbiguousIsUnmatched) {
  std::vector<LabeledReference> gold = {{"a", {}, "R1"}, {"b", {}, std::nullopt}, {"c", {}, "R3"}};
  MatchResult wrong;
  wrong.outcome = MatchOutcome::Matched;
  wrong.record_ids = {"R2"};
  MatchResult spurious = wrong;
  MatchResult amb;
  amb.outcome = MatchOutcome::Ambiguous;
  amb.record_ids = {"R3", "R4"};
  auto cm = evaluate_matcher({{"a", wrong}, {"b", spurious}, {"c", amb}}, gold);
  EXPECT_EQ(cm, (ConfusionMatrix{0, 2, 1, 0}));
}

TEST(EvaluateMatcher, Misaligned) {
  std::vector<LabeledReference> gold = {{"a", {}, "R1"}};
  EXPECT_THROW(evaluate_matcher({}, gold), MisalignedCorpora);
  EXPECT_THROW(evaluate_matcher({{"b", MatchResult{}}}, gold), MisalignedCorpora);
}

// --- HTTP resolver

TEST(HttpResolver, TransportFailureIsUnavailable) {
  HttpResolver r("http://127.0.0.1:9/resolve", 1);
  EXPECT_THROW(r.resolve("anything"), ResolverUnavailable);
}

TEST(HttpResolver, UnsupportedScheme) {
  EXPECT_THROW(HttpResolver("ftp://127.0.0.1/resolve"), ConfigInvalid);
  EXPECT_THROW(HttpResolver("127.0.0.1/resolve"), ConfigInvalid);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  EXPECT_THROW(HttpResolver("https://127.0.0.1/resolve"), ConfigInvalid);
#endif
}

TEST(HttpResolver, AgainstLocalStub) {
  httplib::Server svr;
  svr.Get("/resolve", [](const httplib::Request& req, httplib::Response& res) {
    auto term = req.get_param_value("term");
    if (term == "boom") {
      res.status = 500;
      return;
    }
    json body = {{"record_id", term == "known ref" ? json("R7") : json(nullptr)}};
    res.set_content(body.dump(), "application/json");
  });
  int port = svr.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { svr.listen_after_bind(); });
  svr.wait_until_ready();
  HttpResolver r("http://127.0.0.1:" + std::to_string(port) + "/resolve", 2);
  EXPECT_EQ(r.resolve("known ref"), "R7");
  EXPECT_FALSE(r.resolve("unknown ref"));
  EXPECT_THROW(r.resolve("boom"), ResolverUnavailable);
  svr.stop();
  t.join();
}
