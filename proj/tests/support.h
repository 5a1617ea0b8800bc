// Test helpers: fixture paths, random generators and brute-force oracles.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ebmt/azee_expr.h"
#include "ebmt/matcher.h"
#include "ebmt/partitioner.h"
#include "ebmt/tokenizer.h"

namespace testing_support {

inline std::string fixture(const std::string& rel) { return std::string(EBMT_FIXTURE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
inline CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EBMT_CLI_PATH + "\" " + args + " 2>/dev/null";
  CommandResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

using Rng = std::mt19937;

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Random expression tree; rule names may hold spaces and accents.
inline ebmt::AzNodePtr random_node(Rng& rng, int depth) {
  static const std::vector<std::string> names = {
      "info-about", "side-info", "category", "président", "chef cuisinier", "Bordeaux",
      "multiplicity", "là", "une personne", "all-of", "zone", "nerveusement"};
  static const std::vector<std::string> labels = {"topic", "info", "focus", "elt", "cat", "sig",
                                                  "items", "letters"};
  static const std::vector<std::string> atoms = {"G", "E", "R", "S", "T", "H", "I", "M"};
  const int kind = depth <= 0 ? 0 : uniform(rng, 0, 9);
  if (kind <= 3) {
    return uniform(rng, 0, 4) == 0 ? ebmt::make_atom(pick(rng, atoms))
                                   : ebmt::make_rule(pick(rng, names));
  }
  if (kind <= 5) {
    std::vector<ebmt::AzNodePtr> items;
    const int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) items.push_back(random_node(rng, depth - 1));
    return ebmt::make_list(std::move(items));
  }
  std::vector<ebmt::AzArgument> args;
  const int n = uniform(rng, 1, 3);
  for (int i = 0; i < n; ++i) args.push_back({pick(rng, labels), random_node(rng, depth - 1)});
  return ebmt::make_rule(pick(rng, names), std::move(args));
}

// Random expression whose root is a rule (lists and atoms as roots are
// legal but uncommon in the corpus).
inline ebmt::AzExpr random_expr(Rng& rng, int depth) {
  std::vector<ebmt::AzArgument> args;
  const int n = uniform(rng, 0, 3);
  static const std::vector<std::string> labels = {"topic", "info", "units"};
  for (int i = 0; i < n; ++i) args.push_back({pick(rng, labels), random_node(rng, depth)});
  return ebmt::AzExpr(ebmt::make_rule("info-about", std::move(args)));
}

inline std::vector<ebmt::NodeAddress> all_addresses(const ebmt::AzExpr& e) {
  std::vector<ebmt::NodeAddress> out;
  ebmt::for_each_node(e, [&](const ebmt::NodeAddress& a, const ebmt::AzNode&) { out.push_back(a); });
  return out;
}

// Small vocabulary so that random sentences share words.
inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {
      "le", "la", "les", "l'", "un", "des", "du", "chefs", "vendu", "ici", "banlieue",
      "de", "dans", "comme", "pour", "Bordeaux", "Gerstheim", ",", ":", ".", "parle"};
  return v;
}

inline std::string random_sentence(Rng& rng, int min_words, int max_words,
                                   const std::vector<std::string>& vocab = vocabulary()) {
  const int n = uniform(rng, min_words, max_words);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (!s.empty() && s.back() != '\'') s += ' ';
    s += pick(rng, vocab);
  }
  return s;
}

// ---- oracles -------------------------------------------------------------

inline std::string oracle_key(const ebmt::Token& t) {
  static const std::map<std::string, std::string> groups = {
      {"le", "DEF"}, {"la", "DEF"}, {"les", "DEF"}, {"l", "DEF"},
      {"un", "INDEF"}, {"une", "INDEF"}, {"des", "INDEF"}, {"du", "PART"}};
  if (t.is_punct) return "PUNCT";
  auto it = groups.find(t.normalized);
  return it != groups.end() ? it->second : "w:" + t.normalized;
}

inline int oracle_common(const ebmt::TokenizedText& a, const ebmt::TokenizedText& b) {
  std::multiset<std::string> pool;
  for (const auto& t : a.tokens) {
    if (!t.is_punct) pool.insert(oracle_key(t));
  }
  int n = 0;
  for (const auto& t : b.tokens) {
    if (t.is_punct) continue;
    auto it = pool.find(oracle_key(t));
    if (it != pool.end()) {
      pool.erase(it);
      ++n;
    }
  }
  return n;
}

inline bool oracle_same_content(const ebmt::TokenizedText& a, const ebmt::TokenizedText& b) {
  std::vector<std::string> ka;
  std::vector<std::string> kb;
  for (const auto& t : a.tokens) {
    if (!t.is_punct) ka.push_back(oracle_key(t));
  }
  for (const auto& t : b.tokens) {
    if (!t.is_punct) kb.push_back(oracle_key(t));
  }
  return ka == kb;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

inline int count_gap_regions(const Pairs& m, std::size_t n, std::size_t k) {
  int gaps = 0;
  std::size_t pi = 0;
  std::size_t pj = 0;
  for (auto [i, j] : m) {
    if (i > pi || j > pj) ++gaps;
    pi = i + 1;
    pj = j + 1;
  }
  if (pi < n || pj < k) ++gaps;
  return gaps;
}

// Every monotone matching by subset enumeration: most matches, then fewest
// gap regions, then lexicographically smallest.
inline Pairs oracle_alignment(const ebmt::TokenizedText& seg, const ebmt::TokenizedText& qry) {
  const std::size_t n = seg.size();
  const std::size_t k = qry.size();
  std::vector<std::string> s;
  std::vector<std::string> q;
  for (const auto& t : seg.tokens) s.push_back(oracle_key(t));
  for (const auto& t : qry.tokens) q.push_back(oracle_key(t));

  Pairs best;
  int best_matches = 0;
  int best_gaps = count_gap_regions({}, n, k);
  for (unsigned smask = 1; smask < (1u << n); ++smask) {
    std::vector<std::size_t> si;
    for (std::size_t i = 0; i < n; ++i) {
      if (smask & (1u << i)) si.push_back(i);
    }
    if (si.size() > k || static_cast<int>(si.size()) < best_matches) continue;
    for (unsigned qmask = 1; qmask < (1u << k); ++qmask) {
      if (static_cast<std::size_t>(__builtin_popcount(qmask)) != si.size()) continue;
      Pairs m;
      std::size_t c = 0;
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        if (!(qmask & (1u << j))) continue;
        ok = s[si[c]] == q[j];
        m.emplace_back(si[c++], j);
      }
      if (!ok) continue;
      const int matches = static_cast<int>(m.size());
      const int gaps = count_gap_regions(m, n, k);
      if (matches > best_matches || (matches == best_matches && gaps < best_gaps) ||
          (matches == best_matches && gaps == best_gaps && m < best)) {
        best = m;
        best_matches = matches;
        best_gaps = gaps;
      }
    }
  }
  return best;
}

// Position-labelled rewrite of the gap decomposition.
inline std::vector<ebmt::AntiSpan> oracle_spans(const ebmt::TokenizedText& seg,
                                                const ebmt::TokenizedText& qry, const Pairs& m) {
  struct Block {
    bool matched;
    std::size_t s0, s1, q0, q1;
  };
  std::vector<Block> blocks;
  std::size_t pi = 0;
  std::size_t pj = 0;
  for (std::size_t x = 0; x < m.size();) {
    std::size_t y = x;
    while (y + 1 < m.size() && m[y + 1].first == m[y].first + 1 && m[y + 1].second == m[y].second + 1) ++y;
    if (m[x].first > pi || m[x].second > pj) blocks.push_back({false, pi, m[x].first, pj, m[x].second});
    blocks.push_back({true, m[x].first, m[y].first + 1, m[x].second, m[y].second + 1});
    pi = m[y].first + 1;
    pj = m[y].second + 1;
    x = y + 1;
  }
  if (pi < seg.size() || pj < qry.size()) blocks.push_back({false, pi, seg.size(), pj, qry.size()});

  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    if (!blocks[b].matched) continue;
    bool articles = true;
    for (std::size_t i = blocks[b].s0; i < blocks[b].s1; ++i) articles = articles && seg.tokens[i].is_article;
    if (articles) blocks[b].matched = false;
  }
  std::vector<Block> merged;
  for (const auto& b : blocks) {
    if (!merged.empty() && !merged.back().matched && !b.matched) {
      merged.back().s1 = b.s1;
      merged.back().q1 = b.q1;
    } else {
      merged.push_back(b);
    }
  }
  std::vector<ebmt::AntiSpan> out;
  for (auto b : merged) {
    if (b.matched) continue;
    while (b.s0 < b.s1 && seg.tokens[b.s0].is_punct) ++b.s0;
    while (b.s1 > b.s0 && seg.tokens[b.s1 - 1].is_punct) --b.s1;
    while (b.q0 < b.q1 && qry.tokens[b.q0].is_punct) ++b.q0;
    while (b.q1 > b.q0 && qry.tokens[b.q1 - 1].is_punct) --b.q1;
    if (b.s0 == b.s1) b.s1 = b.s0;
    if (b.q0 == b.q1) b.q1 = b.q0;
    if (b.s0 == b.s1 && b.q0 == b.q1) continue;
    out.push_back({{b.s0, b.s1}, {b.q0, b.q1}});
  }
  return out;
}

// Children lists, then the set of nodes under t by breadth-first search.
inline std::set<std::size_t> oracle_subtree(const ebmt::DepTree& tree, std::size_t t) {
  std::vector<std::vector<std::size_t>> kids(tree.tokens.size());
  for (std::size_t i = 0; i < tree.tokens.size(); ++i) {
    if (tree.tokens[i].head >= 0) kids[static_cast<std::size_t>(tree.tokens[i].head)].push_back(i);
  }
  std::set<std::size_t> out{t};
  std::vector<std::size_t> frontier{t};
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t x : frontier) {
      for (std::size_t c : kids[x]) {
        if (out.insert(c).second) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

// Random tree over n word tokens: each token i > 0 attaches to an earlier
// one, then positions are shuffled so that some subtrees are non-contiguous.
inline ebmt::DepTree random_tree(Rng& rng, std::size_t n) {
  std::vector<int> parent(n, -1);
  for (std::size_t i = 1; i < n; ++i) parent[i] = uniform(rng, 0, static_cast<int>(i) - 1);
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = i;
  if (uniform(rng, 0, 1) == 1) std::shuffle(pos.begin(), pos.end(), rng);
  ebmt::DepTree tree;
  tree.tokens.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tree.tokens[pos[i]].form = "w" + std::to_string(pos[i]);
    tree.tokens[pos[i]].head = parent[i] < 0 ? -1 : static_cast<int>(pos[static_cast<std::size_t>(parent[i])]);
    tree.tokens[pos[i]].deprel = parent[i] < 0 ? "root" : "dep";
  }
  return tree;
}

}  // namespace testing_support
