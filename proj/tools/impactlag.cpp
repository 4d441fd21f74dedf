// impactlag: patent vs paper citation dynamics pipeline.
//
//   impactlag ingest  --patents F --bib F --citations F --out DIR
//   impactlag match   --corpus DIR --aliases F [--resolver F|URL] --out F
//   impactlag metrics --corpus DIR --matches F --out F
//   impactlag stats   --metrics F --out DIR [--percentiles LIST] [--xmin-range A:B]
//   impactlag report  --corpus DIR --metrics F --matches F --out DIR
//
// Settings come from flags, a TOML file (--config) and IMPACTLAG_* variables;
// a variable beats both the flag and the file.

#include <cctype>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "impactlag/cli.hpp"

using impactlag::cli::RunConfig;

namespace {

struct EnvOverride {
  CLI::App* owner;
  std::string var;
  std::function<void(const std::string&)> apply;
};

std::string env_name(const std::string& flag) {
  std::string out = "IMPACTLAG_";
  for (char c : flag.substr(flag.find_first_not_of('-'))) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

class Binder {
public:
  template <typename T>
  CLI::Option* opt(CLI::App* app, const std::string& flag, T& var, const std::string& help) {
    auto* o = app->add_option(flag, var, help)->envname(env_name(flag));
    env_.push_back({app, env_name(flag), [&var, flag](const std::string& s) {
                      if (!CLI::detail::lexical_conversion<T, T>({s}, var))
                        throw impactlag::ConfigInvalid(env_name(flag) + ": cannot parse '" + s + "'");
                    }});
    return o;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, bool& var, const std::string& help) {
    auto* o = app->add_flag(flag, var, help)->envname(env_name(flag));
    env_.push_back({app, env_name(flag), [&var, flag](const std::string& s) {
                      auto v = CLI::detail::to_flag_value(s);
                      var = v > 0;
                    }});
    return o;
  }

  void apply_env(const CLI::App& root) const {
    for (const auto& e : env_) {
      if (e.owner != &root && !e.owner->parsed()) continue;
      if (const char* v = std::getenv(e.var.c_str())) e.apply(v);
    }
  }

private:
  std::vector<EnvOverride> env_;
};

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"impactlag: link patent NPRs to papers and compare patent and paper citation dynamics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file");
  Binder b;
  b.opt(&app, "--threads", cfg.threads, "worker threads (output does not depend on this)");
  b.flag(&app, "--dry-run", cfg.dry_run, "validate inputs and configuration, write nothing");
  b.opt(&app, "--seed", cfg.seed, "seed for synthetic generators");
  b.opt(&app, "--horizon", cfg.horizon_year, "last year of the observation window (default 2013)");
  b.flag(&app, "--lenient", cfg.lenient, "skip and report invalid input lines instead of failing");

  auto* ingest = app.add_subcommand("ingest", "validate raw JSONL inputs into a corpus directory");
  b.opt(ingest, "--patents", cfg.patents, "patents.jsonl")->required();
  b.opt(ingest, "--bib", cfg.bib, "bibliographic records JSONL")->required();
  b.opt(ingest, "--citations", cfg.citations, "paper-to-paper citation edges JSONL")->required();
  b.opt(ingest, "--out", cfg.out, "output corpus directory")->required();

  auto* match = app.add_subcommand("match", "link patent NPR strings to corpus records");
  b.opt(match, "--corpus", cfg.corpus, "corpus directory")->required();
  b.opt(match, "--aliases", cfg.aliases, "journal alias TSV")->required();
  b.opt(match, "--resolver", cfg.resolver, "resolver fixture JSONL or http(s) URL");
  b.opt(match, "--drop-order", cfg.drop_order, "4-field drop order, e.g. author,first_page,volume,year,journal");
  b.opt(match, "--out", cfg.out, "matches.jsonl")->required();

  auto* metrics = app.add_subcommand("metrics", "per-paper citation curves and temporal profiles");
  b.opt(metrics, "--corpus", cfg.corpus, "corpus directory")->required();
  b.opt(metrics, "--matches", cfg.matches, "matches.jsonl")->required();
  b.opt(metrics, "--out", cfg.out, "metrics.jsonl")->required();

  auto* stats = app.add_subcommand("stats", "distributions, power-law fits, overlap, heat map, CDFs");
  b.opt(stats, "--metrics", cfg.metrics, "metrics.jsonl")->required();
  b.opt(stats, "--out", cfg.out, "output directory")->required();
  b.opt(stats, "--percentiles", cfg.percentiles, "overlap percentile grid (default 1..50)")->delimiter(',');
  b.opt(stats, "--xmin-range", cfg.xmin_range, "power-law x_min scan range A:B");
  b.opt(stats, "--min-tail", cfg.min_tail, "minimum tail size for a power-law fit");
  b.flag(stats, "--exact-fit", cfg.exact_fit, "exact discrete MLE instead of the -0.5 approximation");
  b.opt(stats, "--heatmap-bins", cfg.heatmap_bins, "bins per heat map axis");

  auto* report = app.add_subcommand("report", "document type, field and journal tables");
  b.opt(report, "--corpus", cfg.corpus, "corpus directory")->required();
  b.opt(report, "--metrics", cfg.metrics, "metrics.jsonl")->required();
  b.opt(report, "--matches", cfg.matches, "matches.jsonl")->required();
  b.opt(report, "--out", cfg.out, "output directory")->required();
  b.opt(report, "--min-pub-year", cfg.cohort_min_year, "cohort: published in or after this year");
  b.flag(report, "--paper-cited", cfg.cohort_paper_cited, "cohort: at least one paper citation");
  b.opt(report, "--patent-cited", cfg.cohort_patent_cited, "cohort: at least one patent citation (default true)");
  b.opt(report, "--top-journals", cfg.top_journals, "journals listed per field");

  auto* sample = app.add_subcommand("sample", "draw a synthetic discrete power-law sample");
  b.opt(sample, "--alpha", cfg.alpha, "exponent (> 1)");
  b.opt(sample, "--xmin", cfg.x_min, "lower cutoff (>= 1)");
  b.opt(sample, "--n", cfg.n, "sample size");
  b.opt(sample, "--out", cfg.out, "output file")->required();

  try {
    app.parse(argc, argv);
    b.apply_env(app);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const impactlag::Error& e) {
    std::cerr << "impactlag: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return impactlag::cli::run_guarded(cfg);
}
