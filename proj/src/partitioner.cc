#include "ebmt/partitioner.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "ebmt/unicode.h"

namespace ebmt {

PartitionError::PartitionError(Kind kind, int line, const std::string& what)
    : std::runtime_error(what), kind_(kind), line_(line) {}

std::size_t DepTree::root() const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].head < 0) return i;
  }
  return 0;
}

bool DepTree::dominates(std::size_t top, std::size_t node) const {
  std::size_t cur = node;
  for (std::size_t steps = 0; steps <= tokens.size(); ++steps) {
    if (cur == top) return true;
    const int h = tokens[cur].head;
    if (h < 0) return false;
    cur = static_cast<std::size_t>(h);
  }
  return false;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string comment_value(const std::string& line, std::string_view key) {
  // "# key = value"
  std::string body = unicode::trim(std::string_view(line).substr(1));
  if (body.rfind(key, 0) != 0) return {};
  std::string rest = unicode::trim(std::string_view(body).substr(key.size()));
  if (rest.empty() || rest[0] != '=') return {};
  return unicode::trim(std::string_view(rest).substr(1));
}

struct PendingSentence {
  DepTree tree;
  std::vector<int> lines;
  int first_line = 0;

  bool empty() const { return tree.tokens.empty(); }
};

DepTree finish(PendingSentence& s) {
  const std::size_t n = s.tree.tokens.size();
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = s.tree.tokens[i].head;
    if (h >= static_cast<int>(n)) {
      throw PartitionError(PartitionError::Kind::kMalformedConllu, s.lines[i],
                           "head index out of range on line " + std::to_string(s.lines[i]));
    }
    if (h < 0 && ++roots > 1) {
      throw PartitionError(PartitionError::Kind::kMalformedConllu, s.lines[i],
                           "second root on line " + std::to_string(s.lines[i]));
    }
  }
  if (roots == 0) {
    throw PartitionError(PartitionError::Kind::kCycleDetected, s.first_line,
                         "sentence at line " + std::to_string(s.first_line) + " has no root");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (s.tree.tokens[cur].head >= 0) {
      cur = static_cast<std::size_t>(s.tree.tokens[cur].head);
      if (++steps > n) {
        throw PartitionError(PartitionError::Kind::kCycleDetected, s.first_line,
                             "cycle in sentence at line " + std::to_string(s.first_line));
      }
    }
  }
  return std::move(s.tree);
}

bool all_punct(std::string_view form) {
  const std::u32string cps = unicode::decode(form);
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(), [](char32_t c) { return unicode::is_punct(c); });
}

std::string squeeze(std::string_view text) {
  std::string folded = unicode::fold_case(text);
  std::u32string cps = unicode::decode(folded);
  std::u32string kept;
  for (char32_t c : cps) {
    if (!unicode::is_space(c)) kept.push_back(c);
  }
  return unicode::encode(kept);
}

// A proposed partition, as cut positions strictly inside (begin, end).
struct Proposal {
  std::vector<std::size_t> cuts;
  std::size_t excised = 0;  // size of the cut-out subtree
  std::size_t start = 0;
};

// Single-subtree excisions of the parse range [pa, pb).
std::vector<Proposal> excisions(const DepTree& tree, std::size_t pa, std::size_t pb) {
  std::vector<Proposal> out;
  for (std::size_t t = pa; t < pb; ++t) {
    std::size_t lo = pb;
    std::size_t hi = pa;
    std::size_t count = 0;
    for (std::size_t i = pa; i < pb; ++i) {
      if (!tree.dominates(t, i)) continue;
      lo = std::min(lo, i);
      hi = std::max(hi, i + 1);
      ++count;
    }
    if (count == 0 || count != hi - lo || count == pb - pa) continue;
    Proposal p;
    if (lo > pa) p.cuts.push_back(lo);
    if (hi < pb) p.cuts.push_back(hi);
    p.excised = count;
    p.start = lo;
    out.push_back(std::move(p));
  }
  return out;
}

Partition to_partition(std::size_t begin, std::size_t end, const std::vector<std::size_t>& cuts) {
  Partition p;
  std::size_t prev = begin;
  for (std::size_t c : cuts) {
    p.chunks.push_back({prev, c});
    prev = c;
  }
  p.chunks.push_back({prev, end});
  return p;
}

// Punctuation-only chunks join the chunk before them (or after, if first).
Partition merge_punct(const Partition& in, const std::vector<bool>& punct) {
  Partition out;
  bool carry = false;
  std::size_t carry_begin = 0;
  for (const auto& c : in.chunks) {
    bool only_punct = true;
    for (std::size_t i = c.begin; i < c.end; ++i) only_punct = only_punct && punct[i];
    if (only_punct) {
      if (!out.chunks.empty()) {
        out.chunks.back().end = c.end;
      } else if (!carry) {
        carry = true;
        carry_begin = c.begin;
      }
      continue;
    }
    out.chunks.push_back(c);
    if (carry) {
      out.chunks.back().begin = carry_begin;
      carry = false;
    }
  }
  return out;
}

bool all_singletons(const Partition& p) {
  return std::all_of(p.chunks.begin(), p.chunks.end(),
                     [](const TokenRange& r) { return r.size() == 1; });
}

// Collects partitions in order, skipping duplicates; singleton-only
// partitions are kept aside and used only if nothing else turns up.
class Collector {
 public:
  explicit Collector(std::size_t max) : max_(max) {}

  void offer(Partition p) {
    if (p.chunks.size() < 2) return;
    if (std::find(seen_.begin(), seen_.end(), p) != seen_.end()) return;
    seen_.push_back(p);
    if (all_singletons(p)) {
      singletons_.push_back(std::move(p));
    } else if (out_.size() < max_) {
      out_.push_back(std::move(p));
    }
  }

  bool full() const { return out_.size() >= max_; }

  std::vector<Partition> take() {
    if (out_.empty()) {
      if (singletons_.size() > max_) singletons_.resize(max_);
      return std::move(singletons_);
    }
    return std::move(out_);
  }

 private:
  std::size_t max_;
  std::vector<Partition> seen_;
  std::vector<Partition> out_;
  std::vector<Partition> singletons_;
};

struct Ranked {
  Partition partition;
  std::size_t excised;
  std::size_t start;
};

std::vector<Partition> order_and_cap(std::vector<Ranked> ranked, std::size_t max) {
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.partition.chunks.size() != b.partition.chunks.size()) {
      return a.partition.chunks.size() < b.partition.chunks.size();
    }
    if (a.excised != b.excised) return a.excised > b.excised;
    return a.start < b.start;
  });
  Collector collector(max);
  for (auto& r : ranked) collector.offer(std::move(r.partition));
  return collector.take();
}

constexpr std::array<std::string_view, 22> kClauseStarters = {
    "est", "sont", "ont", "a", "ai", "as", "avons", "avez", "étaient", "était", "sera",
    "seront", "serait", "avait", "avaient", "aura", "auront", "fut", "ne", "n", "va", "vont"};

constexpr std::array<std::string_view, 25> kLinkWords = {
    "de",   "du",  "des",  "pour", "dans", "comme",  "à",      "au",     "aux",
    "en",   "avec", "sur", "par",  "sans", "chez",   "vers",   "sous",   "entre",
    "contre", "et", "ou",  "mais", "que",  "qui",    "car"};

template <std::size_t N>
bool in_list(const std::array<std::string_view, N>& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

}  // namespace

std::vector<DepTree> load_parse(std::string_view conllu_text) {
  std::vector<DepTree> out;
  PendingSentence cur;
  std::istringstream in{std::string(conllu_text)};
  std::string line;
  int number = 0;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(finish(cur));
    cur = PendingSentence{};
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (unicode::trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      if (auto id = comment_value(line, "sent_id"); !id.empty()) cur.tree.sentence_id = id;
      if (auto text = comment_value(line, "text"); !text.empty()) cur.tree.text = text;
      continue;
    }
    const auto f = split_tabs(line);
    if (f.size() != 10) {
      throw PartitionError(PartitionError::Kind::kMalformedConllu, number,
                           "expected 10 tab-separated columns on line " +
                               std::to_string(number));
    }
    if (f[0].find('-') != std::string::npos || f[0].find('.') != std::string::npos) continue;
    int id = 0;
    int head = 0;
    if (!parse_int(f[0], id) || id != static_cast<int>(cur.tree.tokens.size()) + 1) {
      throw PartitionError(PartitionError::Kind::kMalformedConllu, number,
                           "bad token id on line " + std::to_string(number));
    }
    if (!parse_int(f[6], head) || head < 0) {
      throw PartitionError(PartitionError::Kind::kMalformedConllu, number,
                           "bad head on line " + std::to_string(number));
    }
    if (cur.empty()) cur.first_line = number;
    cur.tree.tokens.push_back({f[1], head - 1, f[7]});
    cur.lines.push_back(number);
  }
  flush();
  return out;
}

bool is_valid_partition(const Partition& p, std::size_t n) {
  if (p.chunks.size() < 2) return false;
  std::size_t expect = 0;
  for (const auto& c : p.chunks) {
    if (c.begin != expect || c.end <= c.begin) return false;
    expect = c.end;
  }
  return expect == n;
}

std::vector<Partition> enumerate_partitions(const DepTree& tree, std::size_t max_partitions) {
  const std::size_t n = tree.tokens.size();
  std::vector<bool> punct(n);
  for (std::size_t i = 0; i < n; ++i) punct[i] = all_punct(tree.tokens[i].form);
  std::vector<Ranked> ranked;
  for (auto& p : excisions(tree, 0, n)) {
    ranked.push_back({merge_punct(to_partition(0, n, p.cuts), punct), p.excised, p.start});
  }
  return order_and_cap(std::move(ranked), max_partitions);
}

std::optional<AlignedParse> AlignedParse::make(const DepTree& tree, const TokenizedText& query) {
  std::vector<std::size_t> q_off{0};
  std::string q_text;
  for (const auto& t : query.tokens) {
    q_text += squeeze(t.surface);
    q_off.push_back(q_text.size());
  }
  std::vector<std::size_t> p_off{0};
  std::string p_text;
  for (const auto& t : tree.tokens) {
    p_text += squeeze(t.form);
    p_off.push_back(p_text.size());
  }
  if (q_text != p_text || query.empty()) return std::nullopt;

  AlignedParse a;
  a.tree_ = tree;
  a.query_punct_.resize(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) a.query_punct_[i] = query.tokens[i].is_punct;
  a.query_to_parse_.assign(q_off.size(), std::nullopt);
  a.parse_to_query_.assign(p_off.size(), std::nullopt);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < q_off.size() && j < p_off.size()) {
    if (q_off[i] == p_off[j]) {
      // Zero-width tokens would give several positions at one offset; keep
      // the outermost so that whole ranges map.
      if (!a.query_to_parse_[i]) a.query_to_parse_[i] = j;
      if (!a.parse_to_query_[j]) a.parse_to_query_[j] = i;
      ++i;
      ++j;
    } else if (q_off[i] < p_off[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return a;
}

std::optional<std::vector<Partition>> AlignedParse::partitions(TokenRange range,
                                                                std::size_t max_partitions) const {
  if (range.end >= query_to_parse_.size() || range.begin > range.end) return std::nullopt;
  const auto pa = query_to_parse_[range.begin];
  const auto pb = query_to_parse_[range.end];
  if (!pa || !pb) return std::nullopt;
  std::vector<Ranked> ranked;
  for (auto& p : excisions(tree_, *pa, *pb)) {
    std::vector<std::size_t> cuts;
    bool ok = true;
    for (std::size_t c : p.cuts) {
      const auto q = parse_to_query_[c];
      if (!q) {
        ok = false;
        break;
      }
      cuts.push_back(*q);
    }
    if (!ok) continue;
    Partition part = merge_punct(to_partition(range.begin, range.end, cuts), query_punct_);
    ranked.push_back({std::move(part), p.excised, p.start});
  }
  return order_and_cap(std::move(ranked), max_partitions);
}

std::vector<Partition> fallback_chunks(const TokenizedText& query, std::size_t max_partitions) {
  if (query.content_size() < 2) {
    throw PartitionError(PartitionError::Kind::kTooShort, 0,
                         "need at least two words to partition");
  }
  const std::size_t n = query.size();
  std::vector<bool> punct(n);
  for (std::size_t i = 0; i < n; ++i) punct[i] = query.tokens[i].is_punct;

  std::vector<std::size_t> strong;
  std::vector<std::size_t> clause;
  std::vector<std::size_t> weak;
  for (std::size_t c = 1; c < n; ++c) {
    const auto& t = query.tokens[c];
    if (query.tokens[c - 1].is_punct && !t.is_punct) strong.push_back(c);
    if (!t.is_punct && in_list(kClauseStarters, t.normalized)) clause.push_back(c);
    if (!t.is_punct && in_list(kLinkWords, t.normalized)) weak.push_back(c);
  }

  Collector collector(max_partitions);
  auto offer = [&](std::vector<std::size_t> cuts) {
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.empty()) return;
    collector.offer(merge_punct(to_partition(0, n, cuts), punct));
  };

  std::vector<std::size_t> major = strong;
  major.insert(major.end(), clause.begin(), clause.end());
  offer(major);
  offer(strong);
  for (std::size_t c : weak) {
    if (collector.full()) break;
    offer({c});
  }
  for (std::size_t a = 0; a < weak.size() && !collector.full(); ++a) {
    for (std::size_t b = a + 1; b < weak.size() && !collector.full(); ++b) {
      offer({weak[a], weak[b]});
    }
  }

  std::vector<std::size_t> bis;
  for (std::size_t c = 1; c < n; ++c) bis.push_back(c);
  auto imbalance = [n](std::size_t c) { return c * 2 > n ? c * 2 - n : n - c * 2; };
  std::stable_sort(bis.begin(), bis.end(),
                   [&](std::size_t a, std::size_t b) { return imbalance(a) < imbalance(b); });
  for (std::size_t c : bis) {
    if (collector.full()) break;
    offer({c});
  }

  if (!collector.full()) {
    std::vector<std::pair<std::size_t, std::size_t>> tris;
    for (std::size_t a = 1; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) tris.emplace_back(a, b);
    }
    auto spread = [n](const std::pair<std::size_t, std::size_t>& p) {
      const std::size_t s[3] = {p.first, p.second - p.first, n - p.second};
      return *std::max_element(s, s + 3) - *std::min_element(s, s + 3);
    };
    std::stable_sort(tris.begin(), tris.end(),
                     [&](const auto& a, const auto& b) { return spread(a) < spread(b); });
    for (const auto& [a, b] : tris) {
      if (collector.full()) break;
      offer({a, b});
    }
  }
  return collector.take();
}

std::string text_hash(std::string_view sentence) {
  const std::string norm = unicode::normalize_sentence(sentence);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(norm.data(), norm.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < 8 && i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::filesystem::path ParseIndex::path_for(std::string_view sentence) const {
  return dir_ / (text_hash(sentence) + ".conllu");
}

std::optional<DepTree> ParseIndex::lookup(std::string_view sentence) const {
  const auto path = path_for(sentence);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  return load_parse_file(path);
}

DepTree load_parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto trees = load_parse(ss.str());
  if (trees.empty()) throw std::runtime_error(path.string() + " holds no sentence");
  return std::move(trees.front());
}

}  // namespace ebmt
