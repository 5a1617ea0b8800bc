// AZee discourse expressions: an immutable tree of rule applications,
// lists and atoms, with the indentation-based text format used by the
// alignment corpus.
//
//   :info-about
//     'topic
//     :président
//     'info
//     :nerveusement
//       'sig
//       :parler
//
// One node per line, two spaces per depth level. A rule line `:NAME` at depth
// d owns argument pairs at depth d+1: a `'LABEL` line immediately followed by
// the value node on the next line, at the same depth d+1. `list` opens a List
// whose items sit at depth d+1; `.SYMBOL` is an atom.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ebmt {

struct AzNode;
using AzNodePtr = std::shared_ptr<const AzNode>;

struct AzArgument {
  std::string label;
  AzNodePtr value;
};

struct RuleApplication {
  std::string name;
  std::vector<AzArgument> args;
};

struct AzList {
  std::vector<AzNodePtr> items;
};

struct Atom {
  std::string symbol;  // without the leading '.'
};

struct AzNode {
  std::variant<RuleApplication, AzList, Atom> kind;
  std::optional<int> source_line;  // 1-based, when parsed from text

  const RuleApplication* rule() const { return std::get_if<RuleApplication>(&kind); }
  const AzList* list() const { return std::get_if<AzList>(&kind); }
  const Atom* atom() const { return std::get_if<Atom>(&kind); }
};

AzNodePtr make_rule(std::string name, std::vector<AzArgument> args = {});
AzNodePtr make_list(std::vector<AzNodePtr> items);
AzNodePtr make_atom(std::string symbol);

class AzExpr {
 public:
  explicit AzExpr(AzNodePtr root);

  const AzNode& root() const { return *root_; }
  const AzNodePtr& root_ptr() const { return root_; }

 private:
  AzNodePtr root_;
};

/// One child-selection step. `index` is the argument position for rule
/// arguments (the label is kept for display and checked on resolution) or the
/// item position for lists.
struct AddressStep {
  enum class Kind { kArgument, kItem };
  Kind kind;
  std::size_t index;
  std::string label;

  friend bool operator==(const AddressStep&, const AddressStep&) = default;
};

struct NodeAddress {
  std::vector<AddressStep> path;

  bool is_root() const { return path.empty(); }
  /// True if `this` equals `other` or lies on the path to it.
  bool is_prefix_of(const NodeAddress& other) const;
  std::string to_string() const;

  friend bool operator==(const NodeAddress&, const NodeAddress&) = default;
};

class AzError : public std::runtime_error {
 public:
  enum class Kind {
    kEmptyInput,
    kBadIndentation,
    kOrphanArgumentLabel,
    kDanglingLabel,
    kMalformedNesting,
    kNoNodeAtLine,
    kBadAddress,
  };

  AzError(Kind kind, int line, const std::string& what);

  Kind kind() const { return kind_; }
  /// 1-based line, or 0 when not tied to a line.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

AzExpr parse_az(std::string_view text);

std::string print_az(const AzExpr& expr);
std::string print_az(const AzNode& node);

NodeAddress node_at_line(const AzExpr& expr, int line);

/// Throws AzError(kBadAddress) when the address does not resolve.
const AzNodePtr& resolve(const AzExpr& expr, const NodeAddress& at);

/// Structural equality; source lines are ignored.
bool subtree_equal(const AzNode& a, const AzNode& b);

AzExpr substitute(const AzExpr& expr, const NodeAddress& at, AzNodePtr replacement);

/// Pre-order addresses of every node structurally equal to one of `targets`.
std::vector<NodeAddress> find_nodes_matching(const AzExpr& expr,
                                             std::span<const AzNodePtr> targets);

/// Visits every node in pre-order with its address.
template <typename Fn>
void for_each_node(const AzExpr& expr, Fn&& fn);

namespace detail {
template <typename Fn>
void visit_preorder(const AzNode& node, NodeAddress& addr, Fn& fn) {
  fn(static_cast<const NodeAddress&>(addr), node);
  if (const auto* r = node.rule()) {
    for (std::size_t i = 0; i < r->args.size(); ++i) {
      addr.path.push_back({AddressStep::Kind::kArgument, i, r->args[i].label});
      visit_preorder(*r->args[i].value, addr, fn);
      addr.path.pop_back();
    }
  } else if (const auto* l = node.list()) {
    for (std::size_t i = 0; i < l->items.size(); ++i) {
      addr.path.push_back({AddressStep::Kind::kItem, i, {}});
      visit_preorder(*l->items[i], addr, fn);
      addr.path.pop_back();
    }
  }
}
}  // namespace detail

template <typename Fn>
void for_each_node(const AzExpr& expr, Fn&& fn) {
  NodeAddress addr;
  detail::visit_preorder(expr.root(), addr, fn);
}

}  // namespace ebmt
