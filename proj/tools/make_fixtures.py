#!/usr/bin/env python3
"""Generate the bundled mini-corpus and labeled reference set.

Everything is derived from a fixed seed, so rerunning this script reproduces
the files under data/ byte for byte. The script validates its own output
before writing (unique keys, year bounds, gold ids resolvable, no accidental
4-field key collisions between out-of-corpus references and corpus records).

    python3 tools/make_fixtures.py [--out data]
"""

import argparse
import json
import os
import random
import re

SEED = 20130
HORIZON = 2013

# (full name, NLM abbreviation, dotted abbreviation, broad subject terms)
JOURNALS = [
    ("Science", "Science", "Science", ["Science"]),
    ("Nature", "Nature", "Nature", ["Science"]),
    ("Proceedings of the National Academy of Sciences of the United States of America",
     "Proc Natl Acad Sci U S A", "Proc. Natl. Acad. Sci. USA", ["Science"]),
    ("Journal of Biological Chemistry", "J Biol Chem", "J. Biol. Chem.", ["Biochemistry"]),
    ("Biochemistry", "Biochemistry", "Biochemistry", ["Biochemistry"]),
    ("Analytical Biochemistry", "Anal Biochem", "Anal. Biochem.", ["Biochemistry"]),
    ("Journal of Immunological Methods", "J Immunol Methods", "J. Immunol. Methods",
     ["Allergy and Immunology"]),
    ("Journal of Immunology", "J Immunol", "J. Immunol.", ["Allergy and Immunology"]),
    ("Cell", "Cell", "Cell", ["Cell Biology", "Molecular Biology"]),
    ("Molecular and Cellular Biology", "Mol Cell Biol", "Mol. Cell. Biol.",
     ["Molecular Biology", "Cell Biology"]),
    ("Nucleic Acids Research", "Nucleic Acids Res", "Nucleic Acids Res.",
     ["Biochemistry", "Molecular Biology"]),
    ("Cancer Research", "Cancer Res", "Cancer Res.", ["Neoplasms"]),
    ("Journal of Medicinal Chemistry", "J Med Chem", "J. Med. Chem.", ["Chemistry", "Pharmacology"]),
    ("New England Journal of Medicine", "N Engl J Med", "N. Engl. J. Med.", ["Medicine"]),
    ("Journal of Virology", "J Virol", "J. Virol.", ["Virology"]),
]

# journals used only by out-of-corpus references
EXTERNAL_JOURNALS = [
    ("Journal of Bacteriology", "J Bacteriol", "J. Bacteriol.", ["Microbiology"]),
    ("Gene", "Gene", "Gene", ["Genetics"]),
    ("Blood", "Blood", "Blood", ["Hematology"]),
    ("Journal of Molecular Biology", "J Mol Biol", "J. Mol. Biol.", ["Molecular Biology"]),
]

SURNAMES = [
    "Bowie", "Lowry", "Mosmann", "Laemmli", "Bradford", "Sanger", "Southern", "Chomczynski",
    "Kohler", "Milstein", "Saiki", "Mullis", "Altschul", "Thompson", "Higgins", "Smith",
    "Waterman", "Lipman", "Pearson", "Sambrook", "Maniatis", "Towbin", "Gaehtgen", "Burnette",
    "Folin", "Rosebrough", "Farr", "Randall", "Lazar", "Vassar", "Chen", "Wang", "Nakamura",
    "Tanaka", "Muller", "Schmidt", "Rossi", "Garcia", "Martinez", "O'Brien", "McDonald",
    "DeLuca", "Smith-Jones", "Andersson", "Nielsen", "Kowalski", "Ivanov", "Dubois", "Moreau",
    "Becker", "Fischer", "Weber", "Hoffmann", "Kim", "Park", "Lee", "Singh", "Patel", "Cohen",
    "Levy", "Friedman", "Reidhaar-Olson", "Sauer", "Lim", "Hecht", "Brenner", "Horvitz",
]

INITIAL_LETTERS = "ABCDEFGHJKLMNPRSTW"

TITLE_ADJ = ["Rapid", "Selective", "Quantitative", "Improved", "Sensitive", "Structural",
             "Functional", "Comparative", "Novel", "Efficient", "Direct", "Transient"]
TITLE_NOUN = ["assay", "analysis", "characterization", "expression", "purification",
              "detection", "cloning", "regulation", "inhibition", "synthesis", "measurement",
              "mapping", "activation", "binding"]
TITLE_OBJ = ["protein kinase", "messenger RNA", "cell surface receptors", "growth factor alpha",
             "monoclonal antibodies", "DNA polymerase", "amino acid sequences",
             "transcription factors", "membrane proteins", "viral replication",
             "tumor necrosis factor", "T lymphocytes", "restriction enzymes",
             "insulin receptor", "phospholipase activity", "collagen fibrils"]
TITLE_CTX = ["in human cells", "in yeast", "in transgenic mice", "by gel electrophoresis",
             "with the Folin phenol reagent", "using fluorescent probes", "in vitro",
             "during development", "in the rat liver", "by site-directed mutagenesis",
             "in cultured fibroblasts", "under oxidative stress"]

DOC_TYPES = [("Article", 86.6), ("Review", 7.4), ("Note", 3.4), ("Editorial", 1.2),
             ("Letter", 1.0), ("Other", 0.4)]

MONTHS = ["Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.", "Oct.", "Nov.", "Dec."]
COMPANIES = ["Sigma", "Invitrogen", "Promega", "Stratagene", "Qiagen"]
SITES = ["promega", "invitrogen", "ncbi.nlm.nih", "sigmaaldrich", "biorad"]


def fold(s):
    return re.sub(r"[^0-9a-z]", "", s.lower())


class Gen:
    def __init__(self, seed):
        self.r = random.Random(seed)
        self.used_pmids = set()

    def pmid(self):
        while True:
            p = self.r.randint(1000000, 9999999)
            if p not in self.used_pmids:
                self.used_pmids.add(p)
                return "PMID:%d" % p

    def initials(self):
        n = self.r.choice([1, 2, 2, 2])
        return "".join(self.r.choice(INITIAL_LETTERS) for _ in range(n))

    def title(self):
        t = "%s %s of %s %s" % (self.r.choice(TITLE_ADJ), self.r.choice(TITLE_NOUN),
                                self.r.choice(TITLE_OBJ), self.r.choice(TITLE_CTX))
        return t

    def doc_type(self):
        x = self.r.uniform(0, 100)
        acc = 0.0
        for name, w in DOC_TYPES:
            acc += w
            if x <= acc:
                return name
        return "Other"

    def record(self, journal, year=None):
        full, abbrev, _dotted, fields = journal
        year = year if year is not None else self.r.choice(
            list(range(1960, 1976)) + list(range(1976, 2013)) * 3)
        nauth = self.r.choice([1, 2, 2, 3, 3, 4, 5, 6, 7])
        surnames = self.r.sample(SURNAMES, nauth)
        authors = [{"surname": s, "initials": self.initials()} for s in surnames]
        volume = str(max(1, (year - 1950) * self.r.randint(2, 5) + self.r.randint(1, 9)))
        first = self.r.randint(1, 9800)
        return {
            "record_id": self.pmid(),
            "authors": authors,
            "title": self.title(),
            "journal_full": full,
            "journal_abbrev": abbrev,
            "volume": volume,
            "issue": str(self.r.randint(1, 24)) if self.r.random() < 0.85 else None,
            "first_page": str(first),
            "last_page": str(first + self.r.randint(1, 14)),
            "year": year,
            "doc_type": self.doc_type(),
            "fields": list(fields),
            "_journal": journal,
        }


# ---------------------------------------------------------------------------
# rendering: each style returns (raw string, gold parsed fields)


def dotted_initials(ini, spaced=False):
    sep = ". " if spaced else "."
    return sep.join(ini) + "."


def abbreviate_last(first, last):
    # PubMed style: 1306-1310 -> 1306-10
    f, l = str(first), str(last)
    if len(f) == len(l):
        i = 0
        while i < len(f) - 1 and f[i] == l[i]:
            i += 1
        return l[i:]
    return l


def gold(authors=None, title=None, journal=None, volume=None, issue=None, first_page=None,
         year=None):
    return {
        "authors": authors or [],
        "title": title,
        "journal": journal,
        "volume": volume,
        "issue": issue,
        "first_page": first_page,
        "year": year,
    }


def style_science(g, rec):
    a = rec["authors"][0]
    j = g.r.choice([rec["_journal"][1], rec["_journal"][2]])
    if len(rec["authors"]) == 1:
        head = "%s %s." % (a["surname"], a["initials"])
    else:
        head = "%s %s, et al." % (a["surname"], a["initials"])
    raw = "%s %s %s (%d) %s-%s." % (head, j, rec["volume"], rec["year"], rec["first_page"],
                                   rec["last_page"])
    return raw, gold([a], None, j, rec["volume"], None, rec["first_page"], rec["year"])


def style_uspto(g, rec):
    a = rec["authors"][0]
    j = rec["_journal"][2]
    loc = "vol. %s" % rec["volume"]
    issue = None
    if rec["issue"] and g.r.random() < 0.6:
        loc += ", No. %s" % rec["issue"]
        issue = rec["issue"]
    loc += ", pp. %s-%s" % (rec["first_page"], rec["last_page"])
    raw = '%s et al., "%s", %s, %s (%d).' % (a["surname"], rec["title"], j, loc, rec["year"])
    return raw, gold([{"surname": a["surname"], "initials": ""}], rec["title"], j, rec["volume"],
                     issue, rec["first_page"], rec["year"])


def style_colon(g, rec):
    j = rec["_journal"][2]
    n = len(rec["authors"])
    if n <= 3:
        parts = ["%s, %s" % (a["surname"], dotted_initials(a["initials"])) for a in rec["authors"]]
        head = parts[0] if n == 1 else ", ".join(parts[:-1]) + " and " + parts[-1]
        authors = rec["authors"]
    else:
        a = rec["authors"][0]
        head = "%s, %s, et al." % (a["surname"], dotted_initials(a["initials"]))
        authors = [a]
    raw = '%s, "%s," %s, %s:%s-%s, %d.' % (head, rec["title"], j, rec["volume"],
                                          rec["first_page"], rec["last_page"], rec["year"])
    return raw, gold(authors, rec["title"], j, rec["volume"], None, rec["first_page"],
                     rec["year"])


def style_vancouver(g, rec):
    j = rec["_journal"][1]
    shown = rec["authors"][:6]
    head = ", ".join("%s %s" % (a["surname"], a["initials"]) for a in shown)
    if len(rec["authors"]) > 6:
        head += ", et al"
    loc = "%d;%s" % (rec["year"], rec["volume"])
    issue = None
    if rec["issue"]:
        loc += "(%s)" % rec["issue"]
        issue = rec["issue"]
    loc += ":%s-%s" % (rec["first_page"], abbreviate_last(rec["first_page"], rec["last_page"]))
    raw = "%s. %s. %s. %s." % (head, rec["title"], j, loc)
    return raw, gold(shown, rec["title"], j, rec["volume"], issue, rec["first_page"], rec["year"])


def style_harvard(g, rec):
    j = rec["_journal"][0]
    shown = rec["authors"][:3]
    parts = ["%s, %s" % (a["surname"], dotted_initials(a["initials"])) for a in shown]
    head = parts[0] if len(parts) == 1 else ", ".join(parts[:-1]) + " and " + parts[-1]
    if len(rec["authors"]) > 3:
        head = parts[0] + " et al."
        shown = shown[:1]
    raw = "%s (%d) %s. %s %s, %s-%s." % (head, rec["year"], rec["title"], j, rec["volume"],
                                        rec["first_page"], rec["last_page"])
    return raw, gold(shown, rec["title"], j, rec["volume"], None, rec["first_page"], rec["year"])


def style_short(g, rec):
    a = rec["authors"][0]
    j = rec["_journal"][2]
    raw = "%s et al. (%d) %s %s:%s-%s." % (a["surname"], rec["year"], j, rec["volume"],
                                           rec["first_page"], rec["last_page"])
    return raw, gold([{"surname": a["surname"], "initials": ""}], None, j, rec["volume"], None,
                     rec["first_page"], rec["year"])


STYLES = [(style_science, 3), (style_uspto, 5), (style_colon, 3), (style_vancouver, 4),
          (style_harvard, 2), (style_short, 2)]


def pick_style(g):
    total = sum(w for _, w in STYLES)
    x = g.r.uniform(0, total)
    acc = 0
    for fn, w in STYLES:
        acc += w
        if x <= acc:
            return fn
    return STYLES[-1][0]


def non_bibliographic(g, grant_year):
    kind = g.r.randint(0, 4)
    if kind == 0:
        raw = "http://www.%s.com/products/%s%d.html" % (g.r.choice(SITES),
                                                       g.r.choice(["kit", "manual", "protocol"]),
                                                       g.r.randint(1, 99))
        return raw, gold()
    if kind == 1:
        y = g.r.randint(min(1990, grant_year), grant_year)
        raw = "International Search Report for PCT/US%d/0%d, dated %s %d, %d." % (
            y - 1, g.r.randint(10000, 99999), g.r.choice(MONTHS), g.r.randint(1, 28), y)
        return raw, gold(year=y)
    if kind == 2:
        a = g.r.choice(SURNAMES)
        y = g.r.randint(1976, grant_year)
        raw = "%s et al., Molecular Cloning: A Laboratory Manual, %s Ed., Cold Spring Harbor " \
              "Laboratory Press, %d." % (a, g.r.choice(["2nd", "3rd"]), y)
        return raw, gold([{"surname": a, "initials": ""}], year=y)
    if kind == 3:
        y = g.r.randint(1976, grant_year)
        raw = "%s Catalog, %d." % (g.r.choice(COMPANIES), y)
        return raw, gold(year=y)
    y = g.r.randint(min(1980, grant_year - 1), grant_year)
    raw = "U.S. Appl. No. %d/%03d,%03d, filed %s %d, %d." % (
        g.r.randint(8, 13), g.r.randint(0, 999), g.r.randint(0, 999), g.r.choice(MONTHS),
        g.r.randint(1, 28), y)
    return raw, gold(year=y)


def typo(g, word):
    # replace one interior lowercase letter; keeps capitalization pattern intact
    idx = [i for i, c in enumerate(word) if c.islower() and i > 0]
    i = g.r.choice(idx)
    alt = g.r.choice([c for c in "aeioulnrst" if c != word[i]])
    return word[:i] + alt + word[i + 1:]


def corrupt(g, rec, field):
    rec = dict(rec)
    if field == "author":
        authors = [dict(a) for a in rec["authors"]]
        authors[0]["surname"] = typo(g, authors[0]["surname"])
        rec["authors"] = authors
    elif field == "first_page":
        fp = int(rec["first_page"])
        d = g.r.randint(1, 9) * (10 if fp > 100 else 1)
        new = fp + d
        rec["first_page"] = str(new)
        rec["last_page"] = str(max(int(rec["last_page"]), new) + 1)
    elif field == "volume":
        rec["volume"] = str(int(rec["volume"]) + g.r.randint(1, 3))
    elif field == "year":
        rec["year"] = rec["year"] + 1
    return rec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    g = Gen(SEED)

    records = [g.record(g.r.choice(JOURNALS)) for _ in range(196)]
    # a pair of same-author papers in one volume: drop-first-page collides
    twin_a = g.record(JOURNALS[3], year=1995)
    twin_b = dict(g.record(JOURNALS[3], year=1995))
    twin_b["volume"] = twin_a["volume"]
    twin_b["authors"] = [dict(twin_a["authors"][0])] + twin_b["authors"][1:]
    twin_b["first_page"] = str(int(twin_a["first_page"]) + 40)
    twin_b["last_page"] = str(int(twin_b["first_page"]) + 6)
    records += [twin_a, twin_b]
    # anchors for the worked examples
    bowie = g.record(JOURNALS[0], year=1990)
    bowie.update(authors=[{"surname": "Bowie", "initials": "JU"},
                          {"surname": "Reidhaar-Olson", "initials": "JF"},
                          {"surname": "Lim", "initials": "WA"},
                          {"surname": "Sauer", "initials": "RT"}],
                 title="Deciphering the message in protein sequences: tolerance to amino acid "
                       "substitutions",
                 volume="247", issue="4948", first_page="1306", last_page="1310",
                 doc_type="Article")
    mosmann = g.record(JOURNALS[6], year=1983)
    mosmann.update(authors=[{"surname": "Mosmann", "initials": "T"}],
                   title="Rapid colorimetric assay for cellular growth and survival: application "
                         "to proliferation and cytotoxicity assays",
                   volume="65", issue="1-2", first_page="55", last_page="63", doc_type="Article")
    records += [bowie, mosmann]
    assert len(records) == 200

    external = [g.record(g.r.choice(EXTERNAL_JOURNALS + JOURNALS)) for _ in range(60)]

    corpus_keys = set()
    for rec in records:
        for k in four_keys(rec):
            corpus_keys.add(k)
    external = [e for e in external if not any(k in corpus_keys for k in four_keys(e))]

    # citation edges: preferential attachment over cited papers, citing year >= cited year
    weights = [1.0 + (5.0 if g.r.random() < 0.1 else 0.0) for _ in records]
    weights[-2] = 12.0  # the Bowie anchor gets many paper citations
    edges = set()
    edge_list = []
    pre_pub = 0
    while len(edge_list) < 600:
        cited = g.r.choices(range(len(records)), weights=weights)[0]
        cy = records[cited]["year"]
        later = [i for i, r in enumerate(records) if r["year"] >= cy and i != cited]
        earlier = [i for i, r in enumerate(records) if r["year"] == cy - 1]
        if pre_pub < 3 and earlier and g.r.random() < 0.02:
            citing = g.r.choice(earlier)
            pre_pub += 1
        elif later:
            citing = g.r.choice(later)
        else:
            continue
        key = (records[citing]["record_id"], records[cited]["record_id"])
        if key in edges:
            continue
        edges.add(key)
        edge_list.append({"citing": key[0], "cited": key[1], "year": records[citing]["year"]})

    # patents and their NPRs
    patents = []
    labeled = []
    resolver = []
    used_pids = set()
    cite_weights = [1.0 + (8.0 if g.r.random() < 0.08 else 0.0) for _ in records]
    cite_weights[-2] = 10.0
    for pi in range(50):
        while True:
            pid = "US%d" % g.r.randint(3930000, 8620000)
            if pid not in used_pids:
                used_pids.add(pid)
                break
        grant = g.r.choice(list(range(1976, 2014)) + list(range(1995, 2014)) * 2)
        if pi in (7, 23, 41):
            patents.append({"patent_id": pid, "grant_year": grant, "nprs": []})
            continue
        n = g.r.randint(3, 9)
        nprs = []
        for _ in range(n):
            x = g.r.random()
            eligible = [i for i, r in enumerate(records) if r["year"] <= grant]
            if x < 0.62 and eligible:
                idx = g.r.choices(eligible, weights=[cite_weights[i] for i in eligible])[0]
                rec = records[idx]
                y = g.r.random()
                if y < 0.16:
                    rec = corrupt(g, rec, g.r.choice(["author", "first_page", "volume", "year"]))
                elif y < 0.20:
                    f1, f2 = g.r.sample(["author", "first_page", "volume", "year"], 2)
                    rec = corrupt(g, corrupt(g, rec, f1), f2)
                raw, gd = pick_style(g)(g, rec)
                gold_id = records[idx]["record_id"]
                if g.r.random() < 0.15:
                    resolver.append({"term": raw, "record_id": gold_id})
            elif x < 0.80 and external:
                rec = g.r.choice(external)
                raw, gd = pick_style(g)(g, rec)
                gold_id = None
            else:
                raw, gd = non_bibliographic(g, grant)
                gold_id = None
            if raw in nprs:
                continue
            nprs.append(raw)
            labeled.append({"raw": raw, "gold": gd, "gold_record_id": gold_id})
        patents.append({"patent_id": pid, "grant_year": grant, "nprs": nprs})

    # the labeled set is the first 200 distinct NPR strings in patent order
    seen = set()
    labeled_unique = []
    for item in labeled:
        if item["raw"] in seen:
            continue
        seen.add(item["raw"])
        labeled_unique.append(item)
    assert len(labeled_unique) >= 200, len(labeled_unique)
    labeled_unique = labeled_unique[:200]
    labeled_raws = {item["raw"] for item in labeled_unique}
    resolver = [r for r in resolver if r["term"] in labeled_raws]

    table1 = build_table1(Gen(SEED + 1), records, external, (twin_a, twin_b))

    validate(records, patents, edge_list, labeled_unique)

    bib_out = []
    for rec in records:
        out = {k: v for k, v in rec.items() if not k.startswith("_") and k != "last_page"}
        bib_out.append(out)

    os.makedirs(os.path.join(args.out, "mini"), exist_ok=True)
    write_jsonl(os.path.join(args.out, "mini", "bib.jsonl"),
                sorted(bib_out, key=lambda r: r["record_id"]))
    write_jsonl(os.path.join(args.out, "mini", "patents.jsonl"),
                sorted(patents, key=lambda p: p["patent_id"]))
    write_jsonl(os.path.join(args.out, "mini", "citations.jsonl"),
                sorted(edge_list, key=lambda e: (e["citing"], e["cited"])))
    write_jsonl(os.path.join(args.out, "mini", "resolver.jsonl"), resolver)
    write_jsonl(os.path.join(args.out, "labeled_refs.jsonl"), labeled_unique)
    write_jsonl(os.path.join(args.out, "table1_refs.jsonl"), table1)
    with open(os.path.join(args.out, "journal_aliases.tsv"), "w", encoding="utf-8") as f:
        for full, abbrev, dotted, _ in JOURNALS + EXTERNAL_JOURNALS:
            canon = fold(abbrev)
            for alias in sorted({full, abbrev, dotted}):
                f.write("%s\t%s\n" % (alias, canon))

    print("records=%d patents=%d edges=%d labeled=%d resolver=%d (gold-present=%d)" % (
        len(bib_out), len(patents), len(edge_list), len(labeled_unique), len(resolver),
        sum(1 for x in labeled_unique if x["gold_record_id"])))


def build_table1(g, records, external, twins):
    """208 references against the mini corpus: 117 resolvable (clean or one
    corrupted field), 6 unresolvable corpus papers (two corrupted fields, or a
    twin with a wrong first page), 85 without a corpus counterpart."""
    twin_ids = {t["record_id"] for t in twins}
    plain = [r for r in records if r["record_id"] not in twin_ids]
    items = []
    for _ in range(117):
        rec = g.r.choice(plain)
        src = rec
        if g.r.random() < 0.25:
            src = corrupt(g, rec, g.r.choice(["author", "first_page", "volume", "year"]))
        raw, _ = pick_style(g)(g, src)
        items.append({"raw": raw, "gold_record_id": rec["record_id"], "expect": "tp"})
    for i in range(6):
        if i < 2:
            rec = twins[i]
            src = corrupt(g, rec, "first_page")
        else:
            rec = g.r.choice(plain)
            f1, f2 = g.r.sample(["author", "first_page", "volume", "year"], 2)
            src = corrupt(g, corrupt(g, rec, f1), f2)
        raw, _ = pick_style(g)(g, src)
        items.append({"raw": raw, "gold_record_id": rec["record_id"], "expect": "fn"})
    for i in range(85):
        if i % 2 == 0:
            raw, _ = pick_style(g)(g, g.r.choice(external))
        else:
            raw, _ = non_bibliographic(g, 2013)
        items.append({"raw": raw, "gold_record_id": None, "expect": "tn"})
    g.r.shuffle(items)
    return items


def four_keys(rec):
    a = rec["authors"][0]
    full = (fold(rec["_journal"][1]), str(rec["year"]), rec["volume"], rec["first_page"],
            fold(a["surname"]) + a["initials"][:1].lower())
    return [full[:i] + full[i + 1:] for i in range(5)]


def validate(records, patents, edges, labeled):
    ids = [r["record_id"] for r in records]
    assert len(set(ids)) == len(ids)
    for r in records:
        assert 1800 <= r["year"] <= HORIZON
    pids = [p["patent_id"] for p in patents]
    assert len(set(pids)) == len(pids)
    for p in patents:
        assert 1976 <= p["grant_year"] <= HORIZON
    idset = set(ids)
    for e in edges:
        assert e["citing"] in idset and e["cited"] in idset
    for item in labeled:
        gid = item["gold_record_id"]
        assert gid is None or gid in idset


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
