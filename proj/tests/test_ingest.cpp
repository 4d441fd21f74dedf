#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "impactlag/ingest.hpp"
#include "test_support.hpp"

using namespace impactlag;
namespace fs = std::filesystem;

namespace {

const char* kBib =
    R"({"record_id":"R1","authors":[{"surname":"Lowry","initials":"OH"}],"title":"Protein measurement","journal_full":"Journal of Biological Chemistry","journal_abbrev":"J Biol Chem","volume":"193","issue":"1","first_page":"265","year":1951,"doc_type":"Article","fields":["Biochemistry"]}
{"record_id":"R2","authors":[{"surname":"Bowie","initials":"JU"}],"title":"Deciphering","journal_full":"Science","journal_abbrev":"Science","volume":"247","issue":null,"first_page":"1306","year":1990,"doc_type":"Article","fields":["Science"]}
{"record_id":"R3","authors":[{"surname":"Mosmann","initials":"T"}],"title":"Colorimetric assay","journal_full":"Journal of Immunological Methods","journal_abbrev":"J Immunol Methods","volume":"65","issue":"1-2","first_page":"55","year":1983,"doc_type":"Article","fields":["Allergy and Immunology"]}
{"record_id":"R4","authors":[],"title":"Editorial","journal_full":"Science","journal_abbrev":"Science","volume":"250","issue":null,"first_page":"9","year":1990,"doc_type":"Editorial","fields":["Science"]}
{"record_id":"R5","authors":[{"surname":"Smith","initials":"A"}],"title":"Cells","journal_full":"Cell","journal_abbrev":"Cell","volume":"10","issue":"2","first_page":"100","year":2000,"doc_type":"Review","fields":["Cell Biology","Molecular Biology"]}
)";

const char* kPatents =
    R"({"patent_id":"US1","grant_year":1995,"nprs":["Lowry OH, et al. J. Biol. Chem. 193 (1951) 265-275."]}
{"patent_id":"US2","grant_year":2001,"nprs":["Bowie JU, et al. Science 247 (1990) 1306-1310.","http://example.com"]}
{"patent_id":"US3","grant_year":2005,"nprs":[]}
)";

const char* kEdges = R"({"citing":"R2","cited":"R1","year":1990}
{"citing":"R5","cited":"R1","year":2000}
{"citing":"R5","cited":"R2","year":2000}
{"citing":"R5","cited":"R3","year":2000}
)";

struct Files {
  fs::path dir;
  std::string patents() const { return (dir / "patents.jsonl").string(); }
  std::string bib() const { return (dir / "bib.jsonl").string(); }
  std::string edges() const { return (dir / "citations.jsonl").string(); }
};

Files fixture(const std::string& name, const std::string& bib = kBib, const std::string& patents = kPatents,
              const std::string& edges = kEdges) {
  Files f{testsupport::scratch(name)};
  testsupport::write(f.dir / "bib.jsonl", bib);
  testsupport::write(f.dir / "patents.jsonl", patents);
  testsupport::write(f.dir / "citations.jsonl", edges);
  return f;
}

}  // namespace

TEST(Ingest, SmallFixtureCounts) {
  auto f = fixture("small");
  auto l = load_corpus(f.patents(), f.bib(), f.edges());
  EXPECT_EQ(l.corpus.patents.size(), 3u);
  EXPECT_EQ(l.corpus.records.size(), 5u);
  EXPECT_EQ(l.corpus.edges.size(), 4u);
  EXPECT_EQ(l.report.rejected(), 0u);
  EXPECT_EQ(l.report.patents_without_nprs, 1u);
  EXPECT_EQ(l.corpus.field_published.at("Science"), 2);
  EXPECT_FALSE(l.corpus.records.at("R2").issue.has_value());
}

TEST(Ingest, DuplicateRecordIdNamesKey) {
  std::string bib = kBib;
  bib += R"({"record_id":"R3","authors":[],"title":"x","journal_full":"Cell","journal_abbrev":"Cell","volume":"1","issue":null,"first_page":"1","year":1999,"doc_type":"Other","fields":[]})"
         "\n";
  auto f = fixture("dup", bib);
  try {
    load_corpus(f.patents(), f.bib(), f.edges());
    FAIL() << "expected DuplicateKey";
  } catch (const DuplicateKey& e) {
    EXPECT_EQ(e.key(), "R3");
  }
}

TEST(Ingest, MalformedLineReportsLineNumber) {
  std::string bib = kBib;
  bib += "{not json\n";
  auto f = fixture("malformed", bib);
  try {
    load_corpus(f.patents(), f.bib(), f.edges());
    FAIL() << "expected MalformedLine";
  } catch (const MalformedLine& e) {
    EXPECT_EQ(e.line_no(), 6u);
  }
}

TEST(Ingest, MissingYearIsMalformed) {
  auto f = fixture("noyear", R"({"record_id":"R9","authors":[],"title":"x","journal_full":"Cell","journal_abbrev":"Cell","volume":"1","issue":null,"first_page":"1","doc_type":"Other","fields":[]})"
                             "\n");
  EXPECT_THROW(load_corpus(f.patents(), f.bib(), f.edges()), MalformedLine);
}

TEST(Ingest, YearOutOfRange) {
  std::string bib = kBib;
  bib += R"({"record_id":"R9","authors":[],"title":"x","journal_full":"Cell","journal_abbrev":"Cell","volume":"1","issue":null,"first_page":"1","year":2020,"doc_type":"Other","fields":[]})"
         "\n";
  auto f = fixture("future", bib);
  try {
    load_corpus(f.patents(), f.bib(), f.edges());
    FAIL();
  } catch (const YearOutOfRange& e) {
    EXPECT_EQ(e.key(), "R9");
  }
  // a later horizon accepts it
  LoadOptions o;
  o.horizon_year = 2020;
  EXPECT_EQ(load_corpus(f.patents(), f.bib(), f.edges(), o).corpus.records.size(), 6u);
}

TEST(Ingest, PatentGrantYearBeforeFirstGrantYear) {
  auto f = fixture("oldpatent", kBib, R"({"patent_id":"US9","grant_year":1950,"nprs":[]})"
                                      "\n");
  EXPECT_THROW(load_corpus(f.patents(), f.bib(), f.edges()), YearOutOfRange);
}

TEST(Ingest, LenientModeRejectsAndReports) {
  std::string bib = kBib;
  bib += "{not json\n";
  bib += R"({"record_id":"R1","authors":[],"title":"dup","journal_full":"Cell","journal_abbrev":"Cell","volume":"1","issue":null,"first_page":"1","year":1999,"doc_type":"Other","fields":[]})"
         "\n";
  auto f = fixture("lenient", bib);
  LoadOptions o;
  o.strict = false;
  auto l = load_corpus(f.patents(), f.bib(), f.edges(), o);
  EXPECT_EQ(l.corpus.records.size(), 5u);
  EXPECT_EQ(l.report.rejected_records, 2u);
  EXPECT_EQ(l.report.diagnostics.size(), 2u);
}

TEST(Ingest, UnknownEdgeEndpointsAreDroppedWithWarning) {
  std::string edges = kEdges;
  edges += R"({"citing":"R5","cited":"R404","year":2000})"
           "\n";
  auto f = fixture("dangling", kBib, kPatents, edges);
  auto l = load_corpus(f.patents(), f.bib(), f.edges());
  EXPECT_EQ(l.corpus.edges.size(), 4u);
  EXPECT_EQ(l.report.dropped_edges, 1u);
  ASSERT_EQ(l.report.diagnostics.size(), 1u);
  EXPECT_NE(l.report.diagnostics[0].find("R404"), std::string::npos);
}

TEST(Ingest, HeaderCommentsAreSkipped) {
  auto f = fixture("headers", std::string("# impactlag test\n") + kBib);
  EXPECT_EQ(load_corpus(f.patents(), f.bib(), f.edges()).corpus.records.size(), 5u);
}

TEST(Ingest, MiniCorpusLoadsClean) {
  auto l = load_corpus_dir(testsupport::src("data/mini"));
  EXPECT_EQ(l.corpus.patents.size(), 50u);
  EXPECT_EQ(l.corpus.records.size(), 200u);
  EXPECT_EQ(l.corpus.edges.size(), 600u);
  EXPECT_EQ(l.report.rejected(), 0u);
  EXPECT_EQ(l.report.dropped_edges, 0u);
  std::int64_t per_field = 0;
  for (const auto& [f, n] : l.corpus.field_published) per_field += n;
  EXPECT_GE(per_field, 200);
}

TEST(Ingest, DumpLoadDumpIsByteIdentical) {
  auto l = load_corpus_dir(testsupport::src("data/mini"));
  auto dir = testsupport::scratch("roundtrip");
  write_corpus_dir(l.corpus, dir, "# header\n");
  auto again = load_corpus_dir(dir);
  auto a = dump_corpus(l.corpus), b = dump_corpus(again.corpus);
  EXPECT_EQ(a.bib, b.bib);
  EXPECT_EQ(a.patents, b.patents);
  EXPECT_EQ(a.citations, b.citations);
}

TEST(Ingest, DumpIgnoresInputLineOrder) {
  auto shuffled = [](std::string s, unsigned seed) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    std::shuffle(lines.begin(), lines.end(), std::mt19937(seed));
    std::string out;
    for (auto& l : lines) out += l + "\n";
    return out;
  };
  auto f1 = fixture("order1");
  auto f2 = fixture("order2", shuffled(kBib, 1), shuffled(kPatents, 2), shuffled(kEdges, 3));
  auto a = dump_corpus(load_corpus(f1.patents(), f1.bib(), f1.edges()).corpus);
  auto b = dump_corpus(load_corpus(f2.patents(), f2.bib(), f2.edges()).corpus);
  EXPECT_EQ(a.bib, b.bib);
  EXPECT_EQ(a.patents, b.patents);
  EXPECT_EQ(a.citations, b.citations);
}

// --- index

TEST(Index, SingleRecordAnswersItsOwnTuple) {
  auto c = testsupport::corpus_of({testsupport::record("R1", "J Biol Chem", 1951, "193", "265", "Lowry", "OH")});
  auto ix = BibIndex::build(c);
  KeyTuple t{"jbiolchem", "1951", "193", "265", "lowry o"};
  EXPECT_EQ(ix.lookup(t), std::vector<std::string>{"R1"});
  t[4] = "lowry";
  EXPECT_EQ(ix.lookup(t), std::vector<std::string>{"R1"});
}

TEST(Index, SharedFourTupleReturnsBothWhenAuthorDropped) {
  auto c = testsupport::corpus_of({testsupport::record("R1", "Cell", 2000, "10", "100", "Smith", "A"),
                                   testsupport::record("R2", "Cell", 2000, "10", "100", "Jones", "B")});
  auto ix = BibIndex::build(c);
  KeyTuple t{"cell", "2000", "10", "100", "smith a"};
  EXPECT_EQ(ix.lookup(t), std::vector<std::string>{"R1"});
  EXPECT_EQ(ix.lookup(t, MatchField::Author), (std::vector<std::string>{"R1", "R2"}));
}

TEST(Index, EveryMiniRecordFoundByOwnTupleAndTokens) {
  auto c = load_corpus_dir(testsupport::src("data/mini")).corpus;
  auto aliases = JournalAliases::load(testsupport::src("data/journal_aliases.tsv"));
  auto ix = BibIndex::build(c, aliases);
  for (const auto& [id, rec] : c.records) {
    for (const auto& t : BibIndex::record_key_tuples(rec, aliases)) {
      auto hits = ix.lookup(t);
      EXPECT_TRUE(std::find(hits.begin(), hits.end(), id) != hits.end()) << id;
    }
    auto hits = ix.lookup_tokens(BibIndex::record_tokens(rec));
    EXPECT_TRUE(std::find(hits.begin(), hits.end(), id) != hits.end()) << id;
  }
}

TEST(Index, BuildIsInsertionOrderIndependent) {
  auto base = load_corpus_dir(testsupport::src("data/mini")).corpus;
  std::vector<BibRecord> recs;
  for (const auto& [id, r] : base.records) recs.push_back(r);
  std::shuffle(recs.begin(), recs.end(), std::mt19937(7));
  auto shuffled = testsupport::corpus_of(recs);
  auto aliases = JournalAliases::load(testsupport::src("data/journal_aliases.tsv"));
  EXPECT_EQ(BibIndex::build(base, aliases).fingerprint(), BibIndex::build(shuffled, aliases).fingerprint());
}

TEST(Index, RecordWithoutAuthorIsIndexedUnderFourFieldKeys) {
  auto r = testsupport::record("R1", "Science", 1990, "250", "9", "");
  r.authors.clear();
  auto ix = BibIndex::build(testsupport::corpus_of({r}));
  KeyTuple t{"science", "1990", "250", "9", std::nullopt};
  EXPECT_TRUE(ix.lookup(t).empty());
  EXPECT_EQ(ix.lookup(t, MatchField::Author), std::vector<std::string>{"R1"});
}

// --- resolvers

TEST(Resolver, FileResolverExactTerm) {
  FileResolver r;
  r.add("Bowie JU, et al. Science 247 (1990) 1306-1310.", "R2");
  EXPECT_EQ(resolve_remote("  Bowie JU, et al. Science 247 (1990) 1306-1310. ", r), "R2");
  EXPECT_FALSE(resolve_remote("Bowie JU, Science 247 (1990) 1306.", r));
}

TEST(Resolver, ConflictingDuplicateTermThrows) {
  FileResolver r;
  r.add("x", "R1");
  r.add("x", "R1");
  EXPECT_THROW(r.add("x", "R2"), DuplicateKey);
}

TEST(Resolver, BundledFixtureLoads) {
  auto r = FileResolver::load(testsupport::src("data/mini/resolver.jsonl"));
  EXPECT_GT(r.size(), 0u);
}

TEST(Resolver, IndexResolverNeedsUniqueTokenHit) {
  auto c = testsupport::corpus_of({testsupport::record("R1", "Cell", 2000, "10", "100", "Smith", "A"),
                                   testsupport::record("R2", "Cell", 2000, "10", "140", "Smith", "A")});
  auto ix = BibIndex::build(c);
  IndexResolver r(ix);
  EXPECT_EQ(r.resolve("Smith A, Cell 10, 140 (2000)"), "R2");
  EXPECT_FALSE(r.resolve("Smith A, Cell 10 (2000)"));
}
