#pragma once

// Deterministic heuristic segmentation of free-text non-patent references.
//
// Passes run in a fixed order over the raw string:
//   1. locator      volume / issue / page block (several notations)
//   2. year         4-digit token ranked parenthesized > next to locator > last
//   3. authors      run of author names anchored at the head of the string
//   4. title        quoted span, if any
//   5. journal      the text between the author run (or quoted title) and the
//                   locator; an unquoted "Title. Journal" pair is split at the
//                   first sentence break
// Every emitted value is a substring of the input (initials are reduced to
// bare uppercase letters). Unconsumed text is kept as residue.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "impactlag/error.hpp"
#include "impactlag/jsonl.hpp"
#include "impactlag/keys.hpp"
#include "impactlag/text.hpp"
#include "impactlag/types.hpp"

namespace impactlag {

enum class RefField { Authors = 0, Title, Journal, Volume, Issue, FirstPage, Year };

inline constexpr std::size_t kRefFieldCount = 7;
inline constexpr std::array<RefField, kRefFieldCount> kAllRefFields = {
    RefField::Authors, RefField::Title, RefField::Journal, RefField::Volume,
    RefField::Issue, RefField::FirstPage, RefField::Year};

inline std::string_view to_string(RefField f) {
  static constexpr std::array<std::string_view, kRefFieldCount> names = {
      "authors", "title", "journal", "volume", "issue", "first_page", "year"};
  return names[static_cast<std::size_t>(f)];
}

enum class FieldConfidence { Absent, Heuristic };

struct FieldSpan {
  RefField field;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

struct ResidueSegment {
  std::size_t offset = 0;
  std::string text;
};

struct ParsedReference {
  std::vector<Author> authors;
  std::optional<std::string> title;
  std::optional<std::string> journal;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::optional<int> year;

  std::vector<FieldSpan> spans;             // consumed value spans, sorted
  std::vector<ResidueSegment> residue_segments;

  std::string residue() const {
    std::string out;
    for (const auto& s : residue_segments) out += s.text;
    return out;
  }

  bool has(RefField f) const {
    switch (f) {
      case RefField::Authors: return !authors.empty();
      case RefField::Title: return title.has_value();
      case RefField::Journal: return journal.has_value();
      case RefField::Volume: return volume.has_value();
      case RefField::Issue: return issue.has_value();
      case RefField::FirstPage: return first_page.has_value();
      case RefField::Year: return year.has_value();
    }
    return false;
  }

  FieldConfidence confidence(RefField f) const { return has(f) ? FieldConfidence::Heuristic : FieldConfidence::Absent; }
};

// Field-by-field equality after normalization (case/punctuation folded,
// leading zeros stripped from numbers).
inline bool field_equal(const ParsedReference& a, const ParsedReference& b, RefField f) {
  auto opt_eq = [](const std::optional<std::string>& x, const std::optional<std::string>& y, auto norm) {
    if (x.has_value() != y.has_value()) return false;
    return !x || norm(*x) == norm(*y);
  };
  auto fold = [](std::string_view s) { return text::fold(s); };
  auto num = [](std::string_view s) { return text::fold_numeric(s); };
  switch (f) {
    case RefField::Authors: {
      if (a.authors.size() != b.authors.size()) return false;
      for (std::size_t i = 0; i < a.authors.size(); ++i) {
        if (text::fold(a.authors[i].surname) != text::fold(b.authors[i].surname)) return false;
        if (text::fold(a.authors[i].initials) != text::fold(b.authors[i].initials)) return false;
      }
      return true;
    }
    case RefField::Title: return opt_eq(a.title, b.title, fold);
    case RefField::Journal: return opt_eq(a.journal, b.journal, fold);
    case RefField::Volume: return opt_eq(a.volume, b.volume, num);
    case RefField::Issue: return opt_eq(a.issue, b.issue, num);
    case RefField::FirstPage: return opt_eq(a.first_page, b.first_page, num);
    case RefField::Year: return a.year == b.year;
  }
  return false;
}

inline bool same_fields(const ParsedReference& a, const ParsedReference& b) {
  return std::all_of(kAllRefFields.begin(), kAllRefFields.end(), [&](RefField f) { return field_equal(a, b, f); });
}

struct ParserOptions {
  int horizon_year = kDefaultHorizonYear;
};

// Pluggable parser interface; HeuristicParser is the bundled implementation.
class ReferenceParser {
public:
  virtual ~ReferenceParser() = default;
  virtual ParsedReference parse(std::string_view raw) const = 0;
};

namespace parse_detail {

struct Locator {
  std::size_t begin = 0, end = 0;  // whole match
  std::optional<std::pair<std::size_t, std::size_t>> volume, issue, first_page, last_page;
};

using Range = std::pair<std::size_t, std::size_t>;

inline std::optional<Range> group_range(const std::cmatch& m, std::size_t g, std::size_t base) {
  if (g >= m.size() || !m[g].matched || m.length(g) == 0) return std::nullopt;
  return Range{base + static_cast<std::size_t>(m.position(g)), base + static_cast<std::size_t>(m.position(g) + m.length(g))};
}

inline std::optional<long> as_number(std::string_view s) {
  if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), text::is_ascii_digit)) return std::nullopt;
  return std::stol(std::string(s));
}

// "1306-10" style abbreviated ranges are expanded before the A <= B check.
inline bool valid_page_range(std::string_view first, std::string_view last) {
  auto a = as_number(first);
  auto b = as_number(last);
  if (!a || !b) return true;  // alphanumeric pages (e.g. "e123"): not checked
  std::string expanded(last);
  if (last.size() < first.size()) expanded = std::string(first.substr(0, first.size() - last.size())) + std::string(last);
  auto bx = as_number(expanded);
  return bx && *a <= *bx;
}

struct LocatorPattern {
  std::regex re;
  int volume, issue, first_page, last_page;  // group indices, 0 = absent
};

inline const std::vector<LocatorPattern>& locator_patterns() {
  static const std::vector<LocatorPattern> patterns = [] {
    const std::string num = R"(([A-Za-z]?\d+[A-Za-z]?))";
    const std::string page = R"(([A-Za-z]?\d+))";
    const std::string range = R"((?:\s*[-–]\s*([A-Za-z]?\d+))?)";
    std::vector<LocatorPattern> p;
    // vol. 12, No. 3, pp. 45-67
    p.push_back({std::regex(R"(\b[Vv]ol(?:ume)?\.?\s*)" + num +
                            R"((?:\s*,?\s*(?:[Nn]o|[Ii]ssue|[Nn]r)\.?\s*([A-Za-z0-9]+(?:-[A-Za-z0-9]+)?))?)" +
                            R"((?:\s*[,:]?\s*(?:pp?\.|[Pp]ages?)\s*)" + page + range + ")?"),
                 1, 2, 3, 4});
    // 1983;65(1-2):55-63   (year optional)
    p.push_back({std::regex(R"((?:\d{4}\s*)?;\s*)" + num + R"(\s*(?:\(\s*([^()]*?)\s*\))?\s*:\s*)" + page + range),
                 1, 2, 3, 4});
    // 193(4):265-275 or 193:265-275
    p.push_back({std::regex(R"(\b)" + num + R"(\s*(?:\(\s*([^()]*?)\s*\))?\s*:\s*)" + page + range), 1, 2, 3, 4});
    // 247 (1990) 1306-1310   (year optional)
    p.push_back({std::regex(R"(\b)" + num + R"(\s*\(\s*(?:\d{4})?\s*\)\s*,?\s*)" + page + range), 1, 0, 2, 3});
    // 375, 123-125
    p.push_back({std::regex(R"(\b)" + num + R"(\s*,\s*)" + page + R"(\s*[-–]\s*([A-Za-z]?\d+)\b)"), 1, 0, 2, 3});
    // pp. 45-67 with no volume
    p.push_back({std::regex(R"(\bpp?\.\s*)" + page + range), 0, 0, 1, 2});
    return p;
  }();
  return patterns;
}

inline std::optional<Locator> find_locator(std::string_view s) {
  for (const auto& pat : locator_patterns()) {
    std::optional<Locator> best;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    for (std::cregex_iterator it(begin, end, pat.re), stop; it != stop; ++it) {
      const auto& m = *it;
      Locator loc;
      loc.begin = static_cast<std::size_t>(m.position(0));
      loc.end = loc.begin + static_cast<std::size_t>(m.length(0));
      if (pat.volume) loc.volume = group_range(m, pat.volume, 0);
      if (pat.issue) loc.issue = group_range(m, pat.issue, 0);
      if (pat.first_page) loc.first_page = group_range(m, pat.first_page, 0);
      if (pat.last_page) loc.last_page = group_range(m, pat.last_page, 0);
      if (!loc.volume && !loc.first_page) continue;
      if (loc.first_page && loc.last_page) {
        auto fp = s.substr(loc.first_page->first, loc.first_page->second - loc.first_page->first);
        auto lp = s.substr(loc.last_page->first, loc.last_page->second - loc.last_page->first);
        if (!valid_page_range(fp, lp)) continue;
      }
      best = loc;  // last valid match of the highest-priority pattern
    }
    if (best) return best;
  }
  return std::nullopt;
}

inline bool inside(std::size_t pos, const std::optional<Range>& r) { return r && pos >= r->first && pos < r->second; }

struct YearPick {
  int year;
  std::size_t begin, end;  // token
  std::optional<Range> parens;
};

inline std::size_t skip_ws_back(std::string_view s, std::size_t i) {
  while (i > 0 && s[i - 1] == ' ') --i;
  return i;
}

inline std::size_t skip_ws_fwd(std::string_view s, std::size_t i) {
  while (i < s.size() && s[i] == ' ') ++i;
  return i;
}

inline std::optional<YearPick> pick_year(std::string_view s, const std::optional<Locator>& loc, int horizon) {
  std::optional<YearPick> best;
  int best_score = -1;
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    if (!std::all_of(s.begin() + i, s.begin() + i + 4, text::is_ascii_digit)) continue;
    if (i > 0 && (text::is_ascii_alnum(s[i - 1]) || s[i - 1] == '/' || s[i - 1] == '.')) continue;
    if (i + 4 < s.size() && (text::is_ascii_alnum(s[i + 4]) || s[i + 4] == '/')) continue;
    int y = std::stoi(std::string(s.substr(i, 4)));
    if (y < kMinRecordYear || y > horizon + 1) continue;
    if (loc && (inside(i, loc->volume) || inside(i, loc->issue) || inside(i, loc->first_page) || inside(i, loc->last_page)))
      continue;
    std::size_t before = skip_ws_back(s, i);
    std::size_t after = skip_ws_fwd(s, i + 4);
    // part of a digit range such as "1976-1981"
    bool dash_after = after < s.size() && (s[after] == '-' || s.compare(after, 3, "–") == 0);
    bool dash_before = before > 0 && s[before - 1] == '-';
    if (dash_after) {
      auto d = skip_ws_fwd(s, after + (s[after] == '-' ? 1 : 3));
      if (d < s.size() && text::is_ascii_digit(s[d])) continue;
    }
    if (dash_before) {
      auto d = skip_ws_back(s, before - 1);
      if (d > 0 && text::is_ascii_digit(s[d - 1])) continue;
    }
    // labelled values ("p. 1987", "No. 2001") are not years
    {
      std::size_t w = before;
      while (w > 0 && (text::is_ascii_alpha(s[w - 1]) || s[w - 1] == '.')) --w;
      auto label = text::fold(s.substr(w, before - w));
      if (label == "p" || label == "pp" || label == "no" || label == "vol" || label == "volume" || label == "page" ||
          label == "pages")
        continue;
    }

    int score = 1;
    std::optional<Range> parens;
    {
      // enclosing parentheses with a short body, e.g. "(1990)" or "(Mar. 1990)"
      auto open = s.rfind('(', i);
      auto close = s.find(')', i + 4);
      if (open != std::string_view::npos && close != std::string_view::npos && close - open <= 24 &&
          s.substr(open, i - open).find(')') == std::string_view::npos &&
          s.substr(i + 4, close - i - 4).find('(') == std::string_view::npos) {
        score = 3;
        parens = Range{open, close + 1};
      }
    }
    if (score < 3 && loc) {
      bool before_semicolon = after < s.size() && s[after] == ';' && i + 4 <= loc->end && i >= loc->begin;
      bool trails = i >= loc->end && i - loc->end <= 3;
      bool leads = i + 4 <= loc->begin && loc->begin - (i + 4) <= 3;
      if (before_semicolon || trails || leads) score = 2;
    }
    if (score >= best_score) {
      best_score = score;
      best = YearPick{y, i, i + 4, parens};
    }
  }
  return best;
}

struct AuthorMatch {
  Author author;
  std::size_t begin, end;
};

inline std::string initials_of(std::string_view s) {
  std::string out;
  for (char c : s)
    if (text::is_ascii_alpha(c)) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

inline std::optional<AuthorMatch> match_author(std::string_view s, std::size_t pos) {
  static const std::string surname = R"(([A-Z][A-Za-z'\-]*[a-z][A-Za-z'\-]*))";
  // Lowry, O.H.  /  Smith, J. A.
  static const std::regex comma_form(surname + R"(,\s*((?:[A-Z]\.\s?-?){1,3}))");
  // Bowie JU
  static const std::regex vanc_form(surname + R"( ([A-Z]{1,3})(?=[\s,.;]|$))");
  // J.U. Bowie, followed by a list separator
  static const std::regex first_form(R"(((?:[A-Z]\.\s?){1,3}))" + surname + R"((?=\s*(?:,|\band\b|&|$)))");
  // Bowie et al.
  static const std::regex bare_form(surname + R"((?=\s*,?\s*et\.?\s*al\b))");

  const char* b = s.data() + pos;
  const char* e = s.data() + s.size();
  std::cmatch m;
  auto flags = std::regex_constants::match_continuous;
  auto trimmed_end = [&](std::size_t end) {
    while (end > pos && s[end - 1] == ' ') --end;
    return end;
  };
  if (std::regex_search(b, e, m, comma_form, flags)) {
    return AuthorMatch{{m.str(1), initials_of(m.str(2))}, pos, trimmed_end(pos + static_cast<std::size_t>(m.length(0)))};
  }
  if (std::regex_search(b, e, m, vanc_form, flags)) {
    return AuthorMatch{{m.str(1), m.str(2)}, pos, pos + static_cast<std::size_t>(m.length(0))};
  }
  if (std::regex_search(b, e, m, first_form, flags)) {
    return AuthorMatch{{m.str(2), initials_of(m.str(1))}, pos, pos + static_cast<std::size_t>(m.length(0))};
  }
  if (std::regex_search(b, e, m, bare_form, flags)) {
    return AuthorMatch{{m.str(1), ""}, pos, pos + static_cast<std::size_t>(m.length(0))};
  }
  return std::nullopt;
}

struct AuthorRun {
  std::vector<AuthorMatch> authors;
  std::size_t end = 0;  // first position after the run, including "et al."
};

inline AuthorRun match_author_run(std::string_view s, std::size_t limit) {
  static const std::regex sep(R"(\s*(?:,\s*(?:and\s+|&\s*)?|\s+and\s+|\s*&\s*))");
  static const std::regex etal(R"(\s*,?\s*et\.?\s*al\.?)");
  AuthorRun run;
  std::size_t pos = skip_ws_fwd(s, 0);
  std::string_view view = s.substr(0, limit);
  while (true) {
    auto a = match_author(view, pos);
    if (!a) break;
    run.authors.push_back(*a);
    run.end = a->end;
    std::cmatch m;
    const char* b = view.data() + a->end;
    const char* e = view.data() + view.size();
    if (std::regex_search(b, e, m, etal, std::regex_constants::match_continuous)) {
      run.end = a->end + static_cast<std::size_t>(m.length(0));
      break;
    }
    if (!std::regex_search(b, e, m, sep, std::regex_constants::match_continuous)) break;
    std::size_t next = a->end + static_cast<std::size_t>(m.length(0));
    if (std::regex_search(view.data() + next, e, m, etal, std::regex_constants::match_continuous)) {
      run.end = next + static_cast<std::size_t>(m.length(0));
      break;
    }
    if (!match_author(view, next)) break;
    pos = next;
  }
  return run;
}

struct Quoted {
  std::size_t open, close_end;  // including the quote characters
  std::size_t begin, end;       // trimmed body
};

inline std::optional<Quoted> find_quoted(std::string_view s, std::size_t from) {
  struct Q {
    std::string_view open, close;
  };
  static constexpr std::array<Q, 2> kinds = {Q{"\"", "\""}, Q{"“", "”"}};
  std::optional<Quoted> best;
  for (const auto& q : kinds) {
    auto o = s.find(q.open, from);
    if (o == std::string_view::npos) continue;
    auto c = s.find(q.close, o + q.open.size());
    if (c == std::string_view::npos) continue;
    if (best && best->open < o) continue;
    std::size_t b = o + q.open.size(), e = c;
    while (b < e && s[b] == ' ') ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == ',' || s[e - 1] == '.' || s[e - 1] == ';' || s[e - 1] == ':')) --e;
    if (b == e) continue;
    best = Quoted{o, c + q.close.size(), b, e};
  }
  return best;
}

inline bool is_edge_junk(char c) {
  return c == ' ' || c == ',' || c == ';' || c == ':' || c == '.' || c == '(' || c == ')' || c == '[' || c == ']';
}

inline Range trim_junk(std::string_view s, Range r) {
  while (r.first < r.second && is_edge_junk(s[r.first])) ++r.first;
  while (r.second > r.first && is_edge_junk(s[r.second - 1])) --r.second;
  return r;
}

inline std::size_t word_count(std::string_view s) { return text::words(s).size(); }

// Sentence-like text: at least three words and one lowercase-initial word.
// Abbreviated journal names ("Proc. Natl. Acad") are all capitalized.
inline bool looks_like_title(std::string_view s) {
  if (word_count(s) < 3) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (text::is_ascii_lower(s[i]) && (i == 0 || s[i - 1] == ' ')) return true;
  return false;
}

}  // namespace parse_detail

// Year of publication, or nullopt. Precedence: a parenthesized year, then a
// year adjacent to the volume/page block, then the last plausible 4-digit
// token. Tokens that are part of a page or digit range never count.
inline std::optional<int> extract_year(std::string_view raw, int horizon_year = kDefaultHorizonYear) {
  auto loc = parse_detail::find_locator(raw);
  auto pick = parse_detail::pick_year(raw, loc, horizon_year);
  if (!pick) return std::nullopt;
  return pick->year;
}

class HeuristicParser final : public ReferenceParser {
public:
  explicit HeuristicParser(ParserOptions opts = {}) : opts_(opts) {}

  ParsedReference parse(std::string_view raw) const override {
    using namespace parse_detail;
    if (text::trim(raw).empty()) throw EmptyInput("empty reference string");
    const std::string_view s = raw;
    ParsedReference out;

    auto loc = find_locator(s);
    auto year = pick_year(s, loc, opts_.horizon_year);
    auto run = match_author_run(s, loc ? loc->begin : s.size());

    if (!loc && !year && run.authors.empty())
      throw NoBibliographicContent("no year, volume/page block, or author in: " + std::string(s));

    auto take = [&](RefField f, Range r) {
      out.spans.push_back({f, r.first, r.second});
      return std::string(s.substr(r.first, r.second - r.first));
    };

    for (const auto& a : run.authors) {
      out.authors.push_back(a.author);
      out.spans.push_back({RefField::Authors, a.begin, a.end});
    }
    if (year) {
      out.year = year->year;
      out.spans.push_back({RefField::Year, year->begin, year->end});
    }
    if (loc) {
      if (loc->volume) out.volume = take(RefField::Volume, *loc->volume);
      if (loc->issue) out.issue = take(RefField::Issue, *loc->issue);
      if (loc->first_page) out.first_page = take(RefField::FirstPage, *loc->first_page);
    }

    std::size_t region_begin = run.authors.empty() ? 0 : run.end;
    std::optional<Quoted> quoted;
    if (auto q = find_quoted(s, region_begin); q && (!loc || q->close_end <= loc->begin)) {
      quoted = q;
      out.title = take(RefField::Title, {q->begin, q->end});
    }

    if (loc && loc->begin > region_begin) {
      // Pieces of the region not covered by the quoted title or the year.
      std::vector<Range> holes;
      if (quoted) holes.push_back({quoted->open, quoted->close_end});
      if (year) holes.push_back(year->parens ? *year->parens : Range{year->begin, year->end});
      std::sort(holes.begin(), holes.end());
      std::vector<Range> pieces;
      std::size_t cur = region_begin;
      for (const auto& h : holes) {
        if (h.second <= cur || h.first >= loc->begin) continue;
        if (h.first > cur) pieces.push_back({cur, h.first});
        cur = std::max(cur, h.second);
      }
      if (cur < loc->begin) pieces.push_back({cur, loc->begin});

      std::optional<Range> piece;
      for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
        auto t = trim_junk(s, *it);
        if (t.first < t.second && std::any_of(s.begin() + t.first, s.begin() + t.second, text::is_ascii_alpha)) {
          piece = t;
          break;
        }
      }
      if (piece) {
        Range journal = *piece;
        if (!quoted) {
          // "Title words here. Journal Name" -> split at the first sentence
          // break whose left side reads like a title.
          auto body = s.substr(piece->first, piece->second - piece->first);
          for (std::size_t k = 0; k + 2 < body.size(); ++k) {
            if (body[k] != '.' || body[k + 1] != ' ') continue;
            char next = body[k + 2];
            if (!(text::is_ascii_upper(next) || text::is_ascii_digit(next))) continue;
            if (!looks_like_title(body.substr(0, k))) continue;
            Range title{piece->first, piece->first + k};
            Range rest = trim_junk(s, {piece->first + k + 1, piece->second});
            if (rest.first >= rest.second) break;
            out.title = take(RefField::Title, trim_junk(s, title));
            journal = rest;
            break;
          }
        }
        if (journal.first < journal.second) out.journal = take(RefField::Journal, journal);
      }
    }

    std::sort(out.spans.begin(), out.spans.end(), [](const FieldSpan& a, const FieldSpan& b) {
      return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
    });
    std::size_t cur = 0;
    for (const auto& sp : out.spans) {
      if (sp.begin > cur) out.residue_segments.push_back({cur, std::string(s.substr(cur, sp.begin - cur))});
      cur = std::max(cur, sp.end);
    }
    if (cur < s.size()) out.residue_segments.push_back({cur, std::string(s.substr(cur))});
    return out;
  }

  const ParserOptions& options() const { return opts_; }

private:
  ParserOptions opts_;
};

inline ParsedReference parse_reference(std::string_view raw, const ParserOptions& opts = {}) {
  return HeuristicParser(opts).parse(raw);
}

// Canonical citation rendering of parsed fields; parsing it again yields the
// same fields.
inline std::string format_reference(const ParsedReference& p) {
  std::string out;
  for (std::size_t i = 0; i < p.authors.size(); ++i) {
    if (i) out += ", ";
    out += p.authors[i].surname;
    if (!p.authors[i].initials.empty()) out += " " + p.authors[i].initials;
  }
  if (!p.authors.empty() && p.authors.back().initials.empty()) out += " et al.";
  // a period closes an author list ending in initials, so the next part is
  // not read as one more author
  bool after_initials = !p.authors.empty() && !p.authors.back().initials.empty();
  auto sep = [&] {
    if (!out.empty()) out += after_initials ? ". " : ", ";
    after_initials = false;
  };
  if (p.title) {
    sep();
    out += "\"" + *p.title + "\"";
  }
  if (p.journal) {
    sep();
    out += *p.journal;
  }
  if (p.volume) {
    sep();
    out += "vol. " + *p.volume;
  }
  if (p.issue) {
    sep();
    out += "No. " + *p.issue;
  }
  if (p.first_page) {
    sep();
    out += "p. " + *p.first_page;
  }
  if (p.year) out += (out.empty() ? "(" : " (") + std::to_string(*p.year) + ")";
  out += ".";
  return out;
}

// ---------------------------------------------------------------------------
// evaluation against labeled references

struct LabeledReference {
  std::string raw;
  ParsedReference gold;
  std::optional<std::string> gold_record_id;
};

inline ParsedReference parsed_from_json(const json& j) {
  ParsedReference p;
  if (auto it = j.find("authors"); it != j.end() && it->is_array())
    for (const auto& a : *it) p.authors.push_back({a.value("surname", ""), a.value("initials", "")});
  auto opt = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  };
  p.title = opt("title");
  p.journal = opt("journal");
  p.volume = opt("volume");
  p.issue = opt("issue");
  p.first_page = opt("first_page");
  if (auto it = j.find("year"); it != j.end() && !it->is_null()) p.year = it->get<int>();
  return p;
}

inline json to_json(const ParsedReference& p) {
  json authors = json::array();
  for (const auto& a : p.authors) authors.push_back({{"surname", a.surname}, {"initials", a.initials}});
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  return {{"authors", authors},           {"title", opt(p.title)}, {"journal", opt(p.journal)},
          {"volume", opt(p.volume)},     {"issue", opt(p.issue)}, {"first_page", opt(p.first_page)},
          {"year", p.year ? json(*p.year) : json(nullptr)}};
}

inline std::vector<LabeledReference> load_labeled_refs(const std::string& path) {
  std::vector<LabeledReference> out;
  io::for_each_jsonl(path, [&](const json& j, std::size_t line) {
    LabeledReference r;
    auto it = j.find("raw");
    if (it == j.end() || !it->is_string()) throw MalformedLine(path, line, "missing 'raw'");
    r.raw = it->get<std::string>();
    if (auto g = j.find("gold"); g != j.end() && g->is_object()) r.gold = parsed_from_json(*g);
    if (auto g = j.find("gold_record_id"); g != j.end() && g->is_string()) r.gold_record_id = g->get<std::string>();
    out.push_back(std::move(r));
  });
  return out;
}

struct ParserReport {
  std::size_t total = 0;
  std::array<std::size_t, kRefFieldCount> correct{};

  double accuracy(RefField f) const {
    return total ? static_cast<double>(correct[static_cast<std::size_t>(f)]) / static_cast<double>(total) : 0.0;
  }
  double macro_average() const {
    double sum = 0;
    for (RefField f : kAllRefFields) sum += accuracy(f);
    return sum / static_cast<double>(kRefFieldCount);
  }
  json to_json() const {
    json fields = json::object();
    for (RefField f : kAllRefFields) fields[std::string(to_string(f))] = accuracy(f);
    return {{"n", total}, {"fields", fields}, {"macro", macro_average()}};
  }
};

// Per-field exact-match accuracy. A parser error counts as "nothing parsed".
inline ParserReport evaluate_parser(const ReferenceParser& parser, const std::vector<LabeledReference>& labeled) {
  if (labeled.empty()) throw EmptyCorpus("no labeled references");
  ParserReport rep;
  rep.total = labeled.size();
  for (const auto& item : labeled) {
    ParsedReference got;
    try {
      got = parser.parse(item.raw);
    } catch (const Error&) {
      got = {};
    }
    for (RefField f : kAllRefFields)
      if (field_equal(got, item.gold, f)) ++rep.correct[static_cast<std::size_t>(f)];
  }
  return rep;
}

}  // namespace impactlag
