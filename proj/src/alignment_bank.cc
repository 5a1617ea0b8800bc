#include "ebmt/alignment_bank.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ebmt/unicode.h"

namespace ebmt {

namespace fs = std::filesystem;

BankError::BankError(Kind kind, std::string subject, int line, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " (" + subject +
                         (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         "): " + what),
      kind_(kind),
      subject_(std::move(subject)),
      line_(line) {}

std::string_view to_string(BankError::Kind kind) {
  switch (kind) {
    case BankError::Kind::kMissingFile:
      return "MissingFile";
    case BankError::Kind::kOffsetOutOfRange:
      return "OffsetOutOfRange";
    case BankError::Kind::kNoNodeAtLine:
      return "NoNodeAtLine";
    case BankError::Kind::kParseError:
      return "ParseError";
    case BankError::Kind::kMalformedRecord:
      return "MalformedRecord";
  }
  return "BankError";
}

const AzExpr& Bank::source_expression(const std::string& az_file_id) const {
  auto it = sources_.find(az_file_id);
  if (it == sources_.end()) {
    throw BankError(BankError::Kind::kMissingFile, az_file_id, 0, "unknown expression");
  }
  return it->second;
}

BankBuilder& BankBuilder::add_expression(std::string az_file_id, AzExpr expr) {
  bank_.sources_.insert_or_assign(std::move(az_file_id), std::move(expr));
  return *this;
}

BankBuilder& BankBuilder::add(std::string segment, const std::string& az_file_id, int az_line,
                              std::string text_file_id, std::size_t char_start) {
  const AzExpr& expr = bank_.source_expression(az_file_id);
  NodeAddress address;
  try {
    address = node_at_line(expr, az_line);
  } catch (const AzError& e) {
    throw BankError(BankError::Kind::kNoNodeAtLine, az_file_id, az_line, e.what());
  }
  return add_at(std::move(segment), az_file_id, address, std::move(text_file_id), char_start);
}

BankBuilder& BankBuilder::add_at(std::string segment, const std::string& az_file_id,
                                 const NodeAddress& address, std::string text_file_id,
                                 std::size_t char_start) {
  const AzExpr& expr = bank_.source_expression(az_file_id);
  AzNodePtr subtree;
  try {
    subtree = resolve(expr, address);
  } catch (const AzError& e) {
    throw BankError(BankError::Kind::kNoNodeAtLine, az_file_id, 0, e.what());
  }
  TokenizedText tokens = tokenize(segment);
  const std::string key = content_key(tokens);
  for (const auto& existing : bank_.alignments_) {
    if (content_key(existing.segment_tokens) == key &&
        subtree_equal(*existing.az_subtree, *subtree)) {
      ++bank_.collapsed_;
      return *this;
    }
  }
  Alignment a;
  a.id = bank_.alignments_.size();
  a.text_file_id = std::move(text_file_id);
  a.char_start = char_start;
  a.char_len = unicode::decode(segment).size();
  a.az_file_id = az_file_id;
  a.az_line = subtree->source_line.value_or(0);
  a.segment_text = std::move(segment);
  a.segment_tokens = std::move(tokens);
  a.az_subtree = std::move(subtree);
  a.az_address = address;
  bank_.alignments_.push_back(std::move(a));
  return *this;
}

Bank BankBuilder::build() && {
  Bank bank = std::move(bank_);
  bank.exact_index_.clear();
  bank.token_index_.clear();
  for (const auto& a : bank.alignments_) {
    const std::string key = content_key(a.segment_tokens);
    if (!key.empty()) bank.exact_index_[key].push_back(a.id);
    std::set<std::string> seen;
    for (const auto& t : a.segment_tokens.tokens) {
      if (t.is_punct) continue;
      std::string k = match_key(t);
      if (seen.insert(k).second) bank.token_index_[k].push_back(a.id);
    }
  }
  return bank;
}

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TextFile {
  std::string contents;
  std::vector<std::size_t> offsets;  // code point -> byte
};

class CorpusReader {
 public:
  explicit CorpusReader(fs::path dir) : dir_(std::move(dir)) {}

  const TextFile& text(const std::string& id) {
    auto it = texts_.find(id);
    if (it != texts_.end()) return it->second;
    auto contents = read_file(dir_ / id);
    if (!contents) {
      throw BankError(BankError::Kind::kMissingFile, id, 0, "text file not found in corpus");
    }
    TextFile tf{std::move(*contents), {}};
    tf.offsets = unicode::codepoint_offsets(tf.contents);
    return texts_.emplace(id, std::move(tf)).first->second;
  }

  void ensure_expression(BankBuilder& builder, const std::string& id) {
    if (!parsed_.insert(id).second) return;
    auto contents = read_file(dir_ / id);
    if (!contents) {
      throw BankError(BankError::Kind::kMissingFile, id, 0, "AZee file not found in corpus");
    }
    try {
      builder.add_expression(id, parse_az(*contents));
    } catch (const AzError& e) {
      throw BankError(BankError::Kind::kParseError, id, e.line(), e.what());
    }
  }

 private:
  fs::path dir_;
  std::map<std::string, TextFile> texts_;
  std::set<std::string> parsed_;
};

void add_record(BankBuilder& builder, CorpusReader& corpus, const std::string& az_file,
                int az_line, std::string segment, std::string text_id, std::size_t start,
                const std::string& record) {
  corpus.ensure_expression(builder, az_file);
  try {
    builder.add(std::move(segment), az_file, az_line, std::move(text_id), start);
  } catch (const BankError& e) {
    if (e.kind() == BankError::Kind::kNoNodeAtLine) {
      throw BankError(BankError::Kind::kNoNodeAtLine, record, az_line,
                      "no node starts on line " + std::to_string(az_line) + " of " + az_file);
    }
    throw;
  }
}

void load_records(BankBuilder& builder, CorpusReader& corpus, const std::string& text,
                  const std::string& file_name) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = unicode::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::string record = file_name + ":" + std::to_string(number);

    std::istringstream fields(trimmed);
    std::vector<std::string> f;
    for (std::string x; fields >> x;) f.push_back(x);
    if (f.size() != 5) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0,
                      "expected 5 fields, got " + std::to_string(f.size()));
    }
    long long start = 0;
    long long len = 0;
    long long az_line = 0;
    try {
      std::size_t used = 0;
      start = std::stoll(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument("start");
      len = std::stoll(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("len");
      az_line = std::stoll(f[4], &used);
      if (used != f[4].size()) throw std::invalid_argument("line");
    } catch (const std::exception&) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0, "non-numeric field");
    }
    if (az_line < 1) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0, "line must be >= 1");
    }

    const TextFile& tf = corpus.text(f[0]);
    const std::size_t cp_count = tf.offsets.size() - 1;
    if (start < 0 || len < 1 || static_cast<std::size_t>(start + len) > cp_count) {
      throw BankError(BankError::Kind::kOffsetOutOfRange, record, 0,
                      "segment [" + std::to_string(start) + ", +" + std::to_string(len) +
                          ") outside " + f[0] + " (" + std::to_string(cp_count) +
                          " characters)");
    }
    const std::size_t b = tf.offsets[static_cast<std::size_t>(start)];
    const std::size_t e = tf.offsets[static_cast<std::size_t>(start + len)];
    add_record(builder, corpus, f[3], static_cast<int>(az_line), tf.contents.substr(b, e - b),
               f[0], static_cast<std::size_t>(start), record);
  }
}

void load_json(BankBuilder& builder, CorpusReader& corpus, const std::string& text,
               const std::string& file_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw BankError(BankError::Kind::kMalformedRecord, file_name, 0, e.what());
  }
  if (!doc.is_array()) {
    throw BankError(BankError::Kind::kMalformedRecord, file_name, 0, "expected a JSON array");
  }
  std::size_t index = 0;
  for (const auto& obj : doc) {
    const std::string record = file_name + "[" + std::to_string(index++) + "]";
    if (!obj.is_object() || !obj.contains("segment") || !obj["segment"].is_string() ||
        !obj.contains("az_file") || !obj["az_file"].is_string() || !obj.contains("az_line") ||
        !obj["az_line"].is_number_integer()) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0,
                      "needs string 'segment', string 'az_file', integer 'az_line'");
    }
    const int az_line = obj["az_line"].get<int>();
    if (az_line < 1) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0, "az_line must be >= 1");
    }
    std::string segment = obj["segment"].get<std::string>();
    if (unicode::trim(segment).empty()) {
      throw BankError(BankError::Kind::kMalformedRecord, record, 0, "empty segment");
    }
    std::string text_id = obj.value("text_id", std::string());
    std::size_t start = obj.value("char_start", std::size_t{0});
    add_record(builder, corpus, obj["az_file"].get<std::string>(), az_line, std::move(segment),
               std::move(text_id), start, record);
  }
}

NodeAddress enclosing_rule(const AzExpr& expr, NodeAddress addr) {
  while (!addr.path.empty()) {
    addr.path.pop_back();
    if (resolve(expr, addr)->rule()) return addr;
  }
  return addr;
}

}  // namespace

Bank load_bank(const fs::path& corpus_dir, const fs::path& alignment_file) {
  auto text = read_file(alignment_file);
  if (!text) {
    throw BankError(BankError::Kind::kMissingFile, alignment_file.string(), 0,
                    "alignment file not found");
  }
  BankBuilder builder;
  CorpusReader corpus(corpus_dir);
  const std::string name = alignment_file.filename().string();
  if (alignment_file.extension() == ".json") {
    load_json(builder, corpus, *text, name);
  } else {
    load_records(builder, corpus, *text, name);
  }
  return std::move(builder).build();
}

std::vector<Violation> validate(const Bank& bank) {
  std::vector<Violation> out;

  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups(
      bank.exact_index().begin(), bank.exact_index().end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.second.front() < b.second.front(); });
  for (const auto& [key, ids] : groups) {
    std::vector<std::size_t> distinct;
    for (std::size_t id : ids) {
      const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](std::size_t d) {
        return subtree_equal(*bank.alignment(d).az_subtree, *bank.alignment(id).az_subtree);
      });
      if (!seen) distinct.push_back(id);
    }
    if (distinct.size() < 2) continue;
    std::string msg = "segment \"" + bank.alignment(ids.front()).segment_text +
                      "\" is aligned with " + std::to_string(distinct.size()) +
                      " different sub-expressions:";
    for (std::size_t id : distinct) {
      const auto& a = bank.alignment(id);
      msg += " #" + std::to_string(id) + " (" + a.az_file_id + ":" + std::to_string(a.az_line) +
             ")";
    }
    out.push_back({Violation::Kind::kUniqueness, false, distinct, std::move(msg)});
  }

  for (const auto& a : bank.alignments()) {
    if (a.az_address.is_root()) continue;
    const AzExpr& expr = bank.source_expression(a.az_file_id);
    const NodeAddress parent = enclosing_rule(expr, a.az_address);
    const std::string key = content_key(a.segment_tokens);
    for (const auto& b : bank.alignments()) {
      if (b.id == a.id || b.az_file_id != a.az_file_id || !(b.az_address == parent)) continue;
      if (content_key(b.segment_tokens) != key) continue;
      out.push_back({Violation::Kind::kMaximisation, true, {a.id, b.id},
                     "alignment #" + std::to_string(a.id) + " (\"" + a.segment_text +
                         "\") should use the enclosing node, aligned by #" +
                         std::to_string(b.id) + " with the same text"});
    }
  }
  return out;
}

std::vector<std::size_t> exact_alignments(const Bank& bank, const TokenizedText& query) {
  const std::string key = content_key(query);
  if (key.empty()) return {};
  auto it = bank.exact_index().find(key);
  if (it == bank.exact_index().end()) return {};
  std::vector<std::size_t> ids;
  for (std::size_t id : it->second) {
    const bool dup = std::any_of(ids.begin(), ids.end(), [&](std::size_t d) {
      return subtree_equal(*bank.alignment(d).az_subtree, *bank.alignment(id).az_subtree);
    });
    if (!dup) ids.push_back(id);
  }
  return ids;
}

std::vector<AzNodePtr> exact_lookup(const Bank& bank, const TokenizedText& query) {
  std::vector<AzNodePtr> out;
  for (std::size_t id : exact_alignments(bank, query)) out.push_back(bank.alignment(id).az_subtree);
  return out;
}

std::vector<MatchCandidate> antimatchable(const Bank& bank, const TokenizedText& query) {
  std::set<std::size_t> ids;
  for (const auto& t : query.tokens) {
    if (t.is_punct) continue;
    auto it = bank.token_index().find(match_key(t));
    if (it != bank.token_index().end()) ids.insert(it->second.begin(), it->second.end());
  }
  const std::string key = content_key(query);
  std::vector<MatchCandidate> out;
  for (std::size_t id : ids) {
    const Alignment& a = bank.alignment(id);
    if (content_key(a.segment_tokens) == key) continue;
    const MatchScore s = score(a.segment_tokens, query);
    if (s.common < 1) continue;
    out.push_back({id, s.common, s.length, s.ratio, {}});
  }
  return out;
}

}  // namespace ebmt
