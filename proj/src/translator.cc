#include "ebmt/translator.h"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <utility>

namespace ebmt {

std::string_view to_string(Derivation::Kind kind) {
  switch (kind) {
    case Derivation::Kind::kExactMatch:
      return "ExactMatch";
    case Derivation::Kind::kAntiMatch:
      return "AntiMatch";
    case Derivation::Kind::kFallback:
      return "Fallback";
  }
  return "?";
}

int count_steps(const Derivation& d, Derivation::Kind kind) {
  int n = d.kind == kind ? 1 : 0;
  for (const auto& s : d.substitutions) n += count_steps(*s.replacement, kind);
  for (const auto& u : d.units) n += count_steps(*u, kind);
  return n;
}

int derivation_height(const Derivation& d) {
  int h = -1;
  for (const auto& s : d.substitutions) h = std::max(h, derivation_height(*s.replacement));
  for (const auto& u : d.units) h = std::max(h, derivation_height(*u));
  return h + 1;
}

AzNodePtr make_sss_node(std::vector<AzNodePtr> units) {
  if (units.size() < 2) {
    throw TranslateError(TranslateError::Kind::kTooFewUnits,
                         "sign-supported-spoken needs at least 2 units");
  }
  return make_rule("sign-supported-spoken", {{"units", make_list(std::move(units))}});
}

AzExpr make_sss(const std::vector<AzExpr>& units) {
  std::vector<AzNodePtr> nodes;
  for (const auto& u : units) nodes.push_back(u.root_ptr());
  return AzExpr(make_sss_node(std::move(nodes)));
}

AzExpr replay(const Bank& bank, const Derivation& d) {
  switch (d.kind) {
    case Derivation::Kind::kExactMatch:
      return AzExpr(bank.alignment(d.alignment_id).az_subtree);
    case Derivation::Kind::kAntiMatch: {
      AzExpr expr(bank.alignment(d.alignment_id).az_subtree);
      for (const auto& s : d.substitutions) {
        expr = substitute(expr, s.address, replay(bank, *s.replacement).root_ptr());
      }
      return expr;
    }
    case Derivation::Kind::kFallback: {
      std::vector<AzExpr> units;
      for (const auto& u : d.units) units.push_back(replay(bank, *u));
      return make_sss(units);
    }
  }
  throw std::logic_error("unknown derivation kind");
}

namespace {

struct Cand {
  AzNodePtr node;
  DerivationPtr derivation;
  int fallbacks = 0;
  int subs = 0;
  int height = 0;
  std::string printed;
};

using CandList = std::vector<Cand>;

std::string surface_text(const TokenizedText& toks) {
  std::string out;
  for (const auto& t : toks.tokens) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

// Walks every combination of one choice per slot, first slot slowest.
template <typename Fn>
void for_each_combination(const std::vector<const CandList*>& slots, std::size_t cap, Fn&& fn) {
  std::vector<std::size_t> idx(slots.size(), 0);
  for (std::size_t produced = 0; produced < cap; ++produced) {
    fn(idx);
    std::size_t k = slots.size();
    while (k > 0) {
      --k;
      if (++idx[k] < slots[k]->size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (slots.empty()) return;
  }
}

class Session {
 public:
  Session(const Bank& bank, const TranslateConfig& cfg, TokenizedText root,
          std::optional<AlignedParse> parse)
      : bank_(bank), cfg_(cfg), root_(std::move(root)), parse_(std::move(parse)) {}

  const TokenizedText& root() const { return root_; }

  const CandList& full(TokenRange r, int depth) {
    const auto key = std::make_tuple(r.begin, r.end, depth);
    if (auto it = full_memo_.find(key); it != full_memo_.end()) return it->second;
    CandList out;
    if (depth <= cfg_.max_depth) {
      const TokenizedText toks = root_.slice(r.begin, r.end);
      if (toks.content_size() > 0) {
        out = exact(toks);
        if (out.empty() || cfg_.exhaustive) {
          append(out, antimatch(toks, depth, [&](TokenRange c) -> const CandList& {
                   return full({r.begin + c.begin, r.begin + c.end}, depth + 1);
                 }));
        }
        if (out.empty() || cfg_.exhaustive) append(out, partition(r, depth));
        finalize(out);
      }
    }
    return full_memo_.emplace(key, std::move(out)).first->second;
  }

  // No partition fallback: used to identify the node an anti-match stands for.
  const CandList& restricted(const TokenizedText& toks, int depth) {
    auto key = std::make_pair(content_key(toks), depth);
    if (auto it = restricted_memo_.find(key); it != restricted_memo_.end()) return it->second;
    CandList out;
    if (depth <= cfg_.max_depth && toks.content_size() > 0) {
      out = exact(toks);
      if (out.empty() || cfg_.exhaustive) {
        append(out, antimatch(toks, depth, [&](TokenRange c) -> const CandList& {
                 return restricted(toks.slice(c.begin, c.end), depth + 1);
               }));
      }
      finalize(out);
    }
    return restricted_memo_.emplace(std::move(key), std::move(out)).first->second;
  }

  CandList exact(const TokenizedText& toks) const {
    CandList out;
    for (std::size_t id : exact_alignments(bank_, toks)) {
      auto d = std::make_shared<Derivation>();
      d->kind = Derivation::Kind::kExactMatch;
      d->text = surface_text(toks);
      d->alignment_id = id;
      Cand c;
      c.node = bank_.alignment(id).az_subtree;
      c.derivation = std::move(d);
      out.push_back(std::move(c));
    }
    return out;
  }

  CandList antimatch(const TokenizedText& query, int depth,
                     const std::function<const CandList&(TokenRange)>& correction) {
    CandList out;
    for (const auto& mc : rank(antimatchable(bank_, query), cfg_.ranking)) {
      if (out.size() >= cfg_.max_results) break;
      const Alignment& al = bank_.alignment(mc.alignment_id);
      const AntimatchResult am = compute_antimatch(al.segment_tokens, query);
      if (!am.ok() || am.spans.empty()) continue;
      const bool one_sided = std::any_of(am.spans.begin(), am.spans.end(), [](const AntiSpan& s) {
        return s.anti.empty() || s.correction.empty();
      });
      if (one_sided) continue;

      const AzExpr templ(al.az_subtree);
      std::vector<NodeAddress> addresses;
      std::vector<std::string> anti_texts;
      std::vector<const CandList*> slots;
      bool ok = true;
      for (const auto& span : am.spans) {
        const TokenizedText anti = al.segment_tokens.slice(span.anti.begin, span.anti.end);
        const CandList& meaning = restricted(anti, depth + 1);
        if (meaning.empty()) {
          ok = false;
          break;
        }
        std::vector<AzNodePtr> targets;
        for (const auto& m : meaning) targets.push_back(m.node);
        auto found = find_nodes_matching(templ, targets);
        if (found.size() != 1) {
          ok = false;
          break;
        }
        for (const auto& prev : addresses) {
          if (prev.is_prefix_of(found[0]) || found[0].is_prefix_of(prev)) ok = false;
        }
        if (!ok) break;
        const CandList& options = correction(span.correction);
        if (options.empty()) {
          ok = false;
          break;
        }
        addresses.push_back(found[0]);
        anti_texts.push_back(surface_text(anti));
        slots.push_back(&options);
      }
      if (!ok) continue;

      for_each_combination(slots, cfg_.max_combinations, [&](const std::vector<std::size_t>& idx) {
        AzExpr expr = templ;
        auto d = std::make_shared<Derivation>();
        d->kind = Derivation::Kind::kAntiMatch;
        d->text = surface_text(query);
        d->alignment_id = al.id;
        Cand c;
        c.subs = static_cast<int>(slots.size());
        int h = 0;
        for (std::size_t k = 0; k < slots.size(); ++k) {
          const Cand& pick = (*slots[k])[idx[k]];
          expr = substitute(expr, addresses[k], pick.node);
          d->substitutions.push_back({addresses[k], anti_texts[k], pick.derivation});
          c.fallbacks += pick.fallbacks;
          c.subs += pick.subs;
          h = std::max(h, pick.height);
        }
        c.height = h + 1;
        c.node = expr.root_ptr();
        c.derivation = std::move(d);
        out.push_back(std::move(c));
      });
    }
    return out;
  }

  CandList partition(TokenRange r, int depth) {
    const TokenizedText toks = root_.slice(r.begin, r.end);
    if (toks.content_size() < 2) return {};
    std::vector<Partition> parts;
    if (parse_) {
      if (auto p = parse_->partitions(r, cfg_.max_partitions)) parts = std::move(*p);
    }
    if (parts.empty()) {
      for (auto p : fallback_chunks(toks, cfg_.max_partitions)) {
        for (auto& c : p.chunks) {
          c.begin += r.begin;
          c.end += r.begin;
        }
        parts.push_back(std::move(p));
      }
    }

    CandList out;
    for (const auto& part : parts) {
      std::vector<const CandList*> slots;
      bool ok = true;
      for (const auto& chunk : part.chunks) {
        const CandList& units = full(chunk, depth + 1);
        if (units.empty()) {
          ok = false;
          break;
        }
        slots.push_back(&units);
      }
      if (!ok) continue;
      for_each_combination(slots, cfg_.max_combinations, [&](const std::vector<std::size_t>& idx) {
        auto d = std::make_shared<Derivation>();
        d->kind = Derivation::Kind::kFallback;
        d->text = surface_text(toks);
        d->partition = part;
        std::vector<AzNodePtr> nodes;
        Cand c;
        c.fallbacks = 1;
        int h = 0;
        for (std::size_t k = 0; k < slots.size(); ++k) {
          const Cand& pick = (*slots[k])[idx[k]];
          nodes.push_back(pick.node);
          d->units.push_back(pick.derivation);
          c.fallbacks += pick.fallbacks;
          c.subs += pick.subs;
          h = std::max(h, pick.height);
        }
        c.height = h + 1;
        c.node = make_sss_node(std::move(nodes));
        c.derivation = std::move(d);
        out.push_back(std::move(c));
      });
    }
    return out;
  }

  void finalize(CandList& list) const {
    std::stable_sort(list.begin(), list.end(), [](const Cand& a, const Cand& b) {
      return std::tie(a.fallbacks, a.subs, a.height) < std::tie(b.fallbacks, b.subs, b.height);
    });
    std::set<std::string> seen;
    CandList kept;
    for (auto& c : list) {
      if (kept.size() >= cfg_.max_results) break;
      if (c.printed.empty()) c.printed = print_az(*c.node);
      if (!seen.insert(c.printed).second) continue;
      kept.push_back(std::move(c));
    }
    list = std::move(kept);
  }

 private:
  static void append(CandList& to, CandList from) {
    for (auto& c : from) to.push_back(std::move(c));
  }

  const Bank& bank_;
  const TranslateConfig& cfg_;
  TokenizedText root_;
  std::optional<AlignedParse> parse_;
  std::map<std::tuple<std::size_t, std::size_t, int>, CandList> full_memo_;
  std::map<std::pair<std::string, int>, CandList> restricted_memo_;
};

std::vector<TranslationCandidate> to_candidates(const CandList& list) {
  std::vector<TranslationCandidate> out;
  for (const auto& c : list) {
    out.push_back({AzExpr(c.node), c.derivation, c.fallbacks, c.subs, c.height});
  }
  return out;
}

std::optional<AlignedParse> align(const DepTree* parse, const TokenizedText& toks) {
  if (parse == nullptr) return std::nullopt;
  return AlignedParse::make(*parse, toks);
}

}  // namespace

Translator::Translator(const Bank& bank, TranslateConfig cfg) : bank_(bank), cfg_(std::move(cfg)) {
  if (cfg_.max_results < 1 || cfg_.max_depth < 1 || cfg_.max_partitions < 1 ||
      cfg_.max_combinations < 1) {
    throw TranslateError(TranslateError::Kind::kBadConfig, "translation bounds must be >= 1");
  }
}

std::vector<TranslationCandidate> Translator::translate(std::string_view query,
                                                        const DepTree* parse) const {
  TokenizedText toks = tokenize(query);
  if (toks.empty()) throw TranslateError(TranslateError::Kind::kEmptyQuery, "empty query");
  auto aligned = align(parse, toks);
  const std::size_t n = toks.size();
  Session session(bank_, cfg_, std::move(toks), std::move(aligned));
  auto out = to_candidates(session.full({0, n}, 0));
  if (out.empty()) {
    throw TranslateError(TranslateError::Kind::kNoTranslation,
                         "no translation for \"" + std::string(query) + "\"");
  }
  return out;
}

std::vector<AzExpr> Translator::translate_exact(const TokenizedText& query) const {
  std::vector<AzExpr> out;
  for (auto& node : exact_lookup(bank_, query)) out.emplace_back(std::move(node));
  return out;
}

std::vector<TranslationCandidate> Translator::translate_by_antimatch(
    const TokenizedText& query) const {
  Session session(bank_, cfg_, query, std::nullopt);
  CandList list = session.antimatch(query, 0, [&](TokenRange c) -> const CandList& {
    return session.full(c, 1);
  });
  session.finalize(list);
  return to_candidates(list);
}

std::vector<TranslationCandidate> Translator::translate_by_partition(const TokenizedText& query,
                                                                     const DepTree* parse) const {
  Session session(bank_, cfg_, query, align(parse, query));
  CandList list = session.partition({0, query.size()}, 0);
  session.finalize(list);
  return to_candidates(list);
}

}  // namespace ebmt
