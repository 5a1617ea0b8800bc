// azee-ebmt: translate French text to AZee, validate and profile banks.
//
//   azee-ebmt translate --bank DIR [--alignments FILE] (--query STR | --queries FILE)
//   azee-ebmt validate  --bank DIR [--alignments FILE]
//   azee-ebmt stats     --bank DIR [--alignments FILE] --queries FILE
//
// Exit codes: 0 ok, 1 load or environment error, 2 no translation,
// 3 Uniqueness violations (validate).

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebmt/alignment_bank.h"
#include "ebmt/partitioner.h"
#include "ebmt/translator.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitLoad = 1;
constexpr int kExitNoTranslation = 2;
constexpr int kExitViolation = 3;

struct Options {
  std::string bank_dir;
  std::string alignments;
  std::string parses_dir;
  std::string parse_file;
  std::string query;
  std::string queries_file;
  std::string format = "text";
  std::size_t max_results = 12;
  int max_depth = 6;
  bool exhaustive = false;
  int verbose = 0;
  unsigned jobs = 0;
};

fs::path alignment_path(const Options& o) {
  if (!o.alignments.empty()) {
    fs::path p(o.alignments);
    return p.is_absolute() || fs::exists(p) ? p : fs::path(o.bank_dir) / p;
  }
  const fs::path txt = fs::path(o.bank_dir) / "alignments.txt";
  const fs::path json = fs::path(o.bank_dir) / "alignments.json";
  return !fs::exists(txt) && fs::exists(json) ? json : txt;
}

std::optional<ebmt::Bank> load(const Options& o) {
  try {
    ebmt::Bank bank = ebmt::load_bank(o.bank_dir, alignment_path(o));
    if (o.verbose > 0) {
      std::cerr << "loaded " << bank.size() << " alignments";
      if (bank.collapsed_duplicates() > 0) {
        std::cerr << " (" << bank.collapsed_duplicates() << " duplicates collapsed)";
      }
      std::cerr << "\n";
    }
    return bank;
  } catch (const ebmt::BankError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return std::nullopt;
}

bool read_queries(const Options& o, std::vector<std::string>& out) {
  if (!o.query.empty()) out.push_back(o.query);
  if (o.queries_file.empty()) return true;
  std::ifstream in(o.queries_file);
  if (!in) {
    std::cerr << "error: cannot read " << o.queries_file << "\n";
    return false;
  }
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(line);
  }
  return true;
}

ordered_json derivation_json(const ebmt::Bank& bank, const ebmt::Derivation& d) {
  ordered_json j;
  j["step"] = std::string(ebmt::to_string(d.kind));
  j["text"] = d.text;
  if (d.kind != ebmt::Derivation::Kind::kFallback) {
    const auto& a = bank.alignment(d.alignment_id);
    j["alignment"] = d.alignment_id;
    j["az_file"] = a.az_file_id;
    j["az_line"] = a.az_line;
  }
  if (d.kind == ebmt::Derivation::Kind::kAntiMatch) {
    j["substitutions"] = ordered_json::array();
    for (const auto& s : d.substitutions) {
      ordered_json sj;
      sj["address"] = s.address.to_string();
      sj["anti"] = s.anti_text;
      sj["replacement"] = derivation_json(bank, *s.replacement);
      j["substitutions"].push_back(std::move(sj));
    }
  }
  if (d.kind == ebmt::Derivation::Kind::kFallback) {
    j["chunks"] = ordered_json::array();
    for (const auto& c : d.partition.chunks) j["chunks"].push_back({c.begin, c.end});
    j["units"] = ordered_json::array();
    for (const auto& u : d.units) j["units"].push_back(derivation_json(bank, *u));
  }
  return j;
}

void derivation_text(const ebmt::Bank& bank, const ebmt::Derivation& d, int indent,
                     std::ostream& out) {
  out << std::string(static_cast<std::size_t>(indent), ' ') << ebmt::to_string(d.kind);
  if (d.kind != ebmt::Derivation::Kind::kFallback) {
    const auto& a = bank.alignment(d.alignment_id);
    out << " #" << d.alignment_id << " " << a.az_file_id << ":" << a.az_line;
  }
  out << " \"" << d.text << "\"\n";
  for (const auto& s : d.substitutions) {
    out << std::string(static_cast<std::size_t>(indent + 2), ' ') << s.address.to_string()
        << " (\"" << s.anti_text << "\") <-\n";
    derivation_text(bank, *s.replacement, indent + 4, out);
  }
  for (const auto& u : d.units) derivation_text(bank, *u, indent + 2, out);
}

struct QueryResult {
  std::vector<ebmt::TranslationCandidate> candidates;
  std::string error;
  int exit = kExitOk;
};

QueryResult run_query(const ebmt::Translator& tr, const Options& o,
                      const std::string& query, std::string& warning) {
  QueryResult r;
  std::optional<ebmt::DepTree> parse;
  try {
    if (!o.parse_file.empty()) {
      parse = ebmt::load_parse_file(o.parse_file);
    } else if (!o.parses_dir.empty()) {
      parse = ebmt::ParseIndex(o.parses_dir).lookup(query);
    }
    if (parse && !ebmt::AlignedParse::make(*parse, ebmt::tokenize(query))) {
      warning = "parse does not match query tokens; using heuristic chunks";
    }
  } catch (const std::exception& e) {
    warning = std::string("ignoring parse: ") + e.what();
    parse.reset();
  }
  try {
    r.candidates = tr.translate(query, parse ? &*parse : nullptr);
  } catch (const ebmt::TranslateError& e) {
    r.error = e.what();
    r.exit = e.kind() == ebmt::TranslateError::Kind::kNoTranslation ? kExitNoTranslation
                                                                      : kExitLoad;
  }
  return r;
}

std::vector<QueryResult> run_all(const ebmt::Bank& bank, const Options& o,
                                 const std::vector<std::string>& queries) {
  ebmt::TranslateConfig cfg;
  cfg.max_results = o.max_results;
  cfg.max_depth = o.max_depth;
  cfg.exhaustive = o.exhaustive;
  const ebmt::Translator tr(bank, cfg);

  std::vector<QueryResult> results(queries.size());
  std::vector<std::string> warnings(queries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      results[i] = run_query(tr, o, queries[i], warnings[i]);
    }
  };
  unsigned n = o.jobs > 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, queries.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!warnings[i].empty() && o.verbose > 0) {
      std::cerr << "warning: " << queries[i] << ": " << warnings[i] << "\n";
    }
  }
  return results;
}

bool fail_on_uniqueness(const ebmt::Bank& bank) {
  bool bad = false;
  for (const auto& v : ebmt::validate(bank)) {
    if (v.is_warning) continue;
    std::cerr << "error: Uniqueness: " << v.message << "\n";
    bad = true;
  }
  return bad;
}

int cmd_translate(const Options& o) {
  std::vector<std::string> queries;
  if (!read_queries(o, queries)) return kExitLoad;
  if (queries.empty()) {
    std::cerr << "error: give --query or --queries\n";
    return kExitLoad;
  }
  auto bank = load(o);
  if (!bank) return kExitLoad;
  if (fail_on_uniqueness(*bank)) return kExitLoad;

  const auto results = run_all(*bank, o, queries);
  int status = kExitOk;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& r = results[q];
    if (r.exit != kExitOk) {
      std::cerr << "error: " << r.error << "\n";
      status = std::max(status, r.exit);
    }
    for (std::size_t k = 0; k < r.candidates.size(); ++k) {
      const auto& c = r.candidates[k];
      if (o.format == "json") {
        ordered_json j;
        j["query"] = queries[q];
        j["rank"] = k + 1;
        j["azee"] = ebmt::print_az(c.expr);
        j["fallbacks"] = c.fallback_count;
        j["substitutions"] = c.substitution_count;
        j["depth"] = c.depth;
        j["derivation"] = derivation_json(*bank, *c.derivation);
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "# " << queries[q] << " [" << (k + 1) << "/" << r.candidates.size()
                  << "] fallbacks=" << c.fallback_count
                  << " substitutions=" << c.substitution_count << " depth=" << c.depth << "\n";
        std::cout << ebmt::print_az(c.expr);
        if (o.verbose > 0) derivation_text(*bank, *c.derivation, 2, std::cout);
        std::cout << "\n";
      }
    }
  }
  return status;
}

int cmd_validate(const Options& o) {
  auto bank = load(o);
  if (!bank) return kExitLoad;
  const auto violations = ebmt::validate(*bank);
  std::size_t errors = 0;
  for (const auto& v : violations) {
    if (v.is_warning) {
      std::cout << "warning: Maximisation: " << v.message << "\n";
    } else {
      ++errors;
      std::cout << "violation: Uniqueness: " << v.message << "\n";
    }
  }
  std::cout << bank->size() << " alignments, " << errors << " violation(s), "
            << violations.size() - errors << " warning(s)\n";
  return errors > 0 ? kExitViolation : kExitOk;
}

int cmd_stats(const Options& o) {
  std::vector<std::string> queries;
  if (o.queries_file.empty() && o.query.empty()) {
    std::cerr << "error: stats needs --queries\n";
    return kExitLoad;
  }
  if (!read_queries(o, queries)) return kExitLoad;
  auto bank = load(o);
  if (!bank) return kExitLoad;
  const auto results = run_all(*bank, o, queries);

  std::cout << "candidates\tmean_fallbacks\tquery\n";
  std::size_t min_c = 0;
  std::size_t max_c = 0;
  double sum_c = 0;
  double sum_f = 0;
  std::size_t total_cands = 0;
  std::cout << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& cands = results[i].candidates;
    double f = 0;
    for (const auto& c : cands) f += c.fallback_count;
    sum_f += f;
    total_cands += cands.size();
    std::cout << cands.size() << "\t" << (cands.empty() ? 0.0 : f / cands.size()) << "\t"
              << queries[i] << "\n";
    min_c = i == 0 ? cands.size() : std::min(min_c, cands.size());
    max_c = std::max(max_c, cands.size());
    sum_c += static_cast<double>(cands.size());
  }
  const double n = static_cast<double>(queries.size());
  std::cout << "queries " << queries.size() << " min " << min_c << " max " << max_c << " mean "
            << (queries.empty() ? 0.0 : sum_c / n) << " mean_fallbacks "
            << (total_cands == 0 ? 0.0 : sum_f / static_cast<double>(total_cands)) << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--bank", o.bank_dir, "corpus directory (text and .az files)")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--alignments", o.alignments,
                  "alignment file (default: alignments.txt in the bank directory)");
  cmd->add_flag("-v,--verbose", o.verbose, "more output on stderr");
}

void add_translation(CLI::App* cmd, Options& o) {
  cmd->add_option("--parses", o.parses_dir, "directory of <hash>.conllu parses")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--parse", o.parse_file, "CoNLL-U parse for --query")
      ->check(CLI::ExistingFile);
  cmd->add_option("--query", o.query, "French text to translate");
  cmd->add_option("--queries", o.queries_file, "file with one query per line")
      ->check(CLI::ExistingFile);
  cmd->add_option("--max-results", o.max_results, "candidates kept per query")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", o.max_depth, "recursion limit")->check(CLI::PositiveNumber);
  cmd->add_flag("--exhaustive", o.exhaustive, "try every strategy at every level");
  cmd->add_option("-j,--jobs", o.jobs, "worker threads for --queries");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Example-based French to AZee translation"};
  app.require_subcommand(1);
  // One Options per subcommand: CLI11 resets shared flag targets.
  Options ot;
  Options ov;
  Options os;

  auto* translate = app.add_subcommand("translate", "translate queries");
  add_common(translate, ot);
  add_translation(translate, ot);
  translate->add_option("--format", ot.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* validate = app.add_subcommand("validate", "check Uniqueness and Maximisation");
  add_common(validate, ov);

  auto* stats = app.add_subcommand("stats", "candidate and fallback counts over a query set");
  add_common(stats, os);
  add_translation(stats, os);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitLoad;
  }

  if (*translate) return cmd_translate(ot);
  if (*validate) return cmd_validate(ov);
  return cmd_stats(os);
}
