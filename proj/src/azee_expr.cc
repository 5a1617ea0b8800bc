#include "ebmt/azee_expr.h"

#include <utility>

#include "ebmt/unicode.h"

namespace ebmt {

AzNodePtr make_rule(std::string name, std::vector<AzArgument> args) {
  return std::make_shared<const AzNode>(
      AzNode{RuleApplication{std::move(name), std::move(args)}, std::nullopt});
}

AzNodePtr make_list(std::vector<AzNodePtr> items) {
  return std::make_shared<const AzNode>(AzNode{AzList{std::move(items)}, std::nullopt});
}

AzNodePtr make_atom(std::string symbol) {
  return std::make_shared<const AzNode>(AzNode{Atom{std::move(symbol)}, std::nullopt});
}

AzExpr::AzExpr(AzNodePtr root) : root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("AzExpr requires a root node");
}

bool NodeAddress::is_prefix_of(const NodeAddress& other) const {
  if (path.size() > other.path.size()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].kind != other.path[i].kind || path[i].index != other.path[i].index) {
      return false;
    }
  }
  return true;
}

std::string NodeAddress::to_string() const {
  if (path.empty()) return "/";
  std::string out;
  for (const auto& step : path) {
    out += '/';
    if (step.kind == AddressStep::Kind::kArgument) {
      out += '\'';
      out += step.label;
    } else {
      out += std::to_string(step.index);
    }
  }
  return out;
}

AzError::AzError(Kind kind, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

namespace {

enum class LineKind { kRule, kLabel, kList, kAtom };

struct Line {
  int number;
  int depth;
  LineKind kind;
  std::string payload;
};

constexpr int kIndentUnit = 2;

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    std::size_t spaces = 0;
    while (spaces < raw.size() && (raw[spaces] == ' ' || raw[spaces] == '\t')) {
      if (raw[spaces] == '\t') {
        if (unicode::trim(raw).empty()) break;
        throw AzError(AzError::Kind::kBadIndentation, number, "tab in indentation");
      }
      ++spaces;
    }
    std::string content = unicode::nfc(unicode::trim(raw.substr(spaces)));
    if (content.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (spaces % kIndentUnit != 0) {
      throw AzError(AzError::Kind::kBadIndentation, number,
                    "indentation of " + std::to_string(spaces) +
                        " spaces is not a multiple of 2");
    }
    Line line{number, static_cast<int>(spaces / kIndentUnit), LineKind::kRule, {}};
    if (content[0] == ':') {
      line.kind = LineKind::kRule;
      line.payload = unicode::trim(std::string_view(content).substr(1));
      if (line.payload.empty()) {
        throw AzError(AzError::Kind::kMalformedNesting, number, "empty rule name");
      }
    } else if (content[0] == '\'') {
      line.kind = LineKind::kLabel;
      line.payload = unicode::trim(std::string_view(content).substr(1));
      if (line.payload.empty()) {
        throw AzError(AzError::Kind::kMalformedNesting, number, "empty argument label");
      }
    } else if (content == "list") {
      line.kind = LineKind::kList;
    } else if (content[0] == '.') {
      line.kind = LineKind::kAtom;
      line.payload = content.substr(1);
      if (line.payload.empty() ||
          line.payload.find_first_of(" \t") != std::string::npos) {
        throw AzError(AzError::Kind::kMalformedNesting, number,
                      "atom must be a single non-empty symbol");
      }
    } else {
      throw AzError(AzError::Kind::kMalformedNesting, number,
                    "unrecognised line '" + content + "'");
    }
    lines.push_back(std::move(line));
    if (eol == text.size()) break;
  }
  return lines;
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  AzNodePtr parse_root() {
    if (lines_.front().depth != 0) {
      throw AzError(AzError::Kind::kBadIndentation, lines_.front().number,
                    "root node must not be indented");
    }
    AzNodePtr root = parse_node(0);
    if (pos_ < lines_.size()) {
      throw AzError(AzError::Kind::kMalformedNesting, lines_[pos_].number,
                    "expression has more than one root");
    }
    return root;
  }

 private:
  bool more_below(int depth) const {
    return pos_ < lines_.size() && lines_[pos_].depth > depth;
  }

  AzNodePtr parse_node(int depth) {
    const Line& line = lines_[pos_];
    if (line.depth != depth) {
      throw AzError(AzError::Kind::kBadIndentation, line.number,
                    "expected depth " + std::to_string(depth));
    }
    switch (line.kind) {
      case LineKind::kLabel:
        throw AzError(AzError::Kind::kOrphanArgumentLabel, line.number,
                      "argument label '" + line.payload + "' outside a rule");
      case LineKind::kRule:
        return parse_rule(depth);
      case LineKind::kList:
        return parse_list(depth);
      case LineKind::kAtom:
        return parse_atom(depth);
    }
    throw AzError(AzError::Kind::kMalformedNesting, line.number, "unreachable");
  }

  AzNodePtr parse_rule(int depth) {
    const Line& head = lines_[pos_++];
    RuleApplication rule{head.payload, {}};
    while (more_below(depth)) {
      const Line& label = lines_[pos_];
      if (label.depth != depth + 1) {
        throw AzError(AzError::Kind::kBadIndentation, label.number,
                      "expected argument at depth " + std::to_string(depth + 1));
      }
      if (label.kind != LineKind::kLabel) {
        throw AzError(AzError::Kind::kMalformedNesting, label.number,
                      "argument value without a label");
      }
      ++pos_;
      if (pos_ >= lines_.size() || lines_[pos_].depth < depth + 1 ||
          lines_[pos_].kind == LineKind::kLabel) {
        throw AzError(AzError::Kind::kDanglingLabel, label.number,
                      "label '" + label.payload + "' has no value");
      }
      if (lines_[pos_].depth > depth + 1) {
        throw AzError(AzError::Kind::kBadIndentation, lines_[pos_].number,
                      "argument value must sit at the label's depth");
      }
      rule.args.push_back({label.payload, parse_node(depth + 1)});
    }
    return std::make_shared<const AzNode>(AzNode{std::move(rule), head.number});
  }

  AzNodePtr parse_list(int depth) {
    const Line& head = lines_[pos_++];
    AzList list;
    while (more_below(depth)) {
      const Line& item = lines_[pos_];
      if (item.depth != depth + 1) {
        throw AzError(AzError::Kind::kBadIndentation, item.number,
                      "expected list item at depth " + std::to_string(depth + 1));
      }
      list.items.push_back(parse_node(depth + 1));
    }
    return std::make_shared<const AzNode>(AzNode{std::move(list), head.number});
  }

  AzNodePtr parse_atom(int depth) {
    const Line& head = lines_[pos_++];
    if (more_below(depth)) {
      throw AzError(AzError::Kind::kMalformedNesting, lines_[pos_].number,
                    "atom cannot have children");
    }
    return std::make_shared<const AzNode>(AzNode{Atom{head.payload}, head.number});
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

void print_node(const AzNode& node, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth * kIndentUnit), ' ');
  if (const auto* r = node.rule()) {
    out += indent + ':' + r->name + '\n';
    const std::string arg_indent(static_cast<std::size_t>((depth + 1) * kIndentUnit), ' ');
    for (const auto& arg : r->args) {
      out += arg_indent + '\'' + arg.label + '\n';
      print_node(*arg.value, depth + 1, out);
    }
  } else if (const auto* l = node.list()) {
    out += indent + "list\n";
    for (const auto& item : l->items) print_node(*item, depth + 1, out);
  } else {
    out += indent + '.' + node.atom()->symbol + '\n';
  }
}

AzNodePtr replace_at(const AzNodePtr& node, const NodeAddress& at, std::size_t step,
                     AzNodePtr replacement) {
  if (step == at.path.size()) return replacement;
  const AddressStep& s = at.path[step];
  if (const auto* r = node->rule(); r && s.kind == AddressStep::Kind::kArgument &&
                                    s.index < r->args.size()) {
    RuleApplication copy = *r;
    copy.args[s.index].value =
        replace_at(r->args[s.index].value, at, step + 1, std::move(replacement));
    return std::make_shared<const AzNode>(AzNode{std::move(copy), node->source_line});
  }
  if (const auto* l = node->list(); l && s.kind == AddressStep::Kind::kItem &&
                                    s.index < l->items.size()) {
    AzList copy = *l;
    copy.items[s.index] = replace_at(l->items[s.index], at, step + 1, std::move(replacement));
    return std::make_shared<const AzNode>(AzNode{std::move(copy), node->source_line});
  }
  throw AzError(AzError::Kind::kBadAddress, 0, "address " + at.to_string() + " does not resolve");
}

}  // namespace

AzExpr parse_az(std::string_view text) {
  std::vector<Line> lines = split_lines(text);
  if (lines.empty()) throw AzError(AzError::Kind::kEmptyInput, 0, "empty AZee input");
  return AzExpr(Parser(std::move(lines)).parse_root());
}

std::string print_az(const AzNode& node) {
  std::string out;
  print_node(node, 0, out);
  return out;
}

std::string print_az(const AzExpr& expr) { return print_az(expr.root()); }

NodeAddress node_at_line(const AzExpr& expr, int line) {
  std::optional<NodeAddress> found;
  for_each_node(expr, [&](const NodeAddress& addr, const AzNode& node) {
    if (!found && node.source_line == line) found = addr;
  });
  if (!found) {
    throw AzError(AzError::Kind::kNoNodeAtLine, line, "no node starts on this line");
  }
  return *found;
}

const AzNodePtr& resolve(const AzExpr& expr, const NodeAddress& at) {
  const AzNodePtr* cur = &expr.root_ptr();
  for (const auto& s : at.path) {
    const AzNode& node = **cur;
    if (const auto* r = node.rule(); r && s.kind == AddressStep::Kind::kArgument &&
                                      s.index < r->args.size() &&
                                      (s.label.empty() || r->args[s.index].label == s.label)) {
      cur = &r->args[s.index].value;
    } else if (const auto* l = node.list(); l && s.kind == AddressStep::Kind::kItem &&
                                            s.index < l->items.size()) {
      cur = &l->items[s.index];
    } else {
      throw AzError(AzError::Kind::kBadAddress, 0,
                    "address " + at.to_string() + " does not resolve");
    }
  }
  return *cur;
}

bool subtree_equal(const AzNode& a, const AzNode& b) {
  if (&a == &b) return true;
  if (a.kind.index() != b.kind.index()) return false;
  if (const auto* ra = a.rule()) {
    const auto* rb = b.rule();
    if (ra->name != rb->name || ra->args.size() != rb->args.size()) return false;
    for (std::size_t i = 0; i < ra->args.size(); ++i) {
      if (ra->args[i].label != rb->args[i].label) return false;
      if (!subtree_equal(*ra->args[i].value, *rb->args[i].value)) return false;
    }
    return true;
  }
  if (const auto* la = a.list()) {
    const auto* lb = b.list();
    if (la->items.size() != lb->items.size()) return false;
    for (std::size_t i = 0; i < la->items.size(); ++i) {
      if (!subtree_equal(*la->items[i], *lb->items[i])) return false;
    }
    return true;
  }
  return a.atom()->symbol == b.atom()->symbol;
}

AzExpr substitute(const AzExpr& expr, const NodeAddress& at, AzNodePtr replacement) {
  if (!replacement) throw std::invalid_argument("substitute: null replacement");
  resolve(expr, at);  // validates labels as well as indices
  return AzExpr(replace_at(expr.root_ptr(), at, 0, std::move(replacement)));
}

std::vector<NodeAddress> find_nodes_matching(const AzExpr& expr,
                                             std::span<const AzNodePtr> targets) {
  std::vector<NodeAddress> out;
  if (targets.empty()) return out;
  for_each_node(expr, [&](const NodeAddress& addr, const AzNode& node) {
    for (const auto& t : targets) {
      if (subtree_equal(node, *t)) {
        out.push_back(addr);
        break;
      }
    }
  });
  return out;
}

}  // namespace ebmt
