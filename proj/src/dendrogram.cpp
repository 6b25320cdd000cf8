#include "dht/dendrogram.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dht/error.hpp"

namespace dht {

namespace {

// Node indices in post-order (children before parents). Iterative so that
// deep caterpillar trees do not exhaust the stack.
std::vector<int> post_order(std::span<const Dendrogram::Node> nodes, int root) {
  std::vector<int> order;
  order.reserve(nodes.size());
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [n, state] = stack.back();
    const auto& node = nodes[static_cast<std::size_t>(n)];
    if (node.is_leaf() || state == 2) {
      order.push_back(n);
      stack.pop_back();
      continue;
    }
    const int next = node.child[static_cast<std::size_t>(state)];
    ++state;
    stack.emplace_back(next, 0);
  }
  return order;
}

[[noreturn]] void invalid(const std::string& why) {
  throw Error(ErrorKind::InvalidDendrogram, why);
}

struct TextParser {
  std::string_view text;
  std::size_t pos = 0;
  std::vector<Dendrogram::Node> nodes;
  std::vector<std::string> tokens;  // per leaf id

  int parse_node(int depth) {
    if (depth > 100000) invalid("nesting too deep");
    if (pos >= text.size()) invalid("unexpected end of input");
    if (text[pos] == '(') {
      ++pos;
      const int self = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int a = parse_node(depth + 1);
      expect(',');
      const int b = parse_node(depth + 1);
      expect(')');
      nodes[static_cast<std::size_t>(self)].child = {a, b};
      return self;
    }
    const auto start = pos;
    while (pos < text.size() && text[pos] != '(' && text[pos] != ')' && text[pos] != ',') ++pos;
    if (pos == start) invalid("empty leaf token at offset " + std::to_string(start));
    Dendrogram::Node leaf;
    leaf.leaf = static_cast<int>(tokens.size());
    tokens.emplace_back(text.substr(start, pos - start));
    nodes.push_back(leaf);
    return static_cast<int>(nodes.size()) - 1;
  }

  void expect(char c) {
    if (pos >= text.size() || text[pos] != c) {
      invalid(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    }
    ++pos;
  }
};

}  // namespace

std::size_t CanonicalForm::leaf_count() const {
  return static_cast<std::size_t>(std::count(text_.begin(), text_.end(), 'x'));
}

Dendrogram Dendrogram::from_nodes(std::vector<Node> nodes, int root) {
  if (root < 0 || static_cast<std::size_t>(root) >= nodes.size()) invalid("root out of range");
  for (auto& n : nodes) n.parent = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const bool no_children = n.child[0] < 0 && n.child[1] < 0;
    if (n.is_leaf() != no_children) invalid("node " + std::to_string(i) + " is not leaf-or-binary");
    if (n.is_leaf()) continue;
    if (n.child[0] < 0 || n.child[1] < 0) invalid("internal node needs two children");
    for (int c : n.child) {
      if (static_cast<std::size_t>(c) >= nodes.size()) invalid("child out of range");
      auto& child = nodes[static_cast<std::size_t>(c)];
      if (child.parent != -1 || c == root) invalid("node has two parents");
      child.parent = static_cast<int>(i);
    }
  }
  Dendrogram d;
  d.nodes_ = std::move(nodes);
  d.root_ = root;
  if (post_order(d.nodes_, root).size() != d.nodes_.size()) invalid("unreachable nodes");
  d.index_leaves();
  return d;
}

void Dendrogram::index_leaves() {
  leaf_node_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) leaf_node_.emplace_back(nodes_[i].leaf, static_cast<int>(i));
  }
  std::sort(leaf_node_.begin(), leaf_node_.end());
  for (std::size_t i = 1; i < leaf_node_.size(); ++i) {
    if (leaf_node_[i].first == leaf_node_[i - 1].first) invalid("duplicate leaf id");
  }
  // A dendrogram relates events, so it needs at least two of them.
  if (leaf_node_.size() < 2) throw Error(ErrorKind::TooFewLeaves, "dendrogram needs >= 2 leaves");
}

Dendrogram Dendrogram::from_leaf_codes(std::span<const EdgeCode> codes) {
  if (codes.size() < 2) throw Error(ErrorKind::TooFewLeaves, "dendrogram needs >= 2 leaves");
  std::vector<Node> nodes(1);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    int cur = 0;
    for (auto digit : codes[i].digits()) {
      if (nodes[static_cast<std::size_t>(cur)].is_leaf()) {
        invalid("leaf codes are not prefix-free: " + codes[i].to_string());
      }
      int next = nodes[static_cast<std::size_t>(cur)].child[digit];
      if (next < 0) {
        next = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[static_cast<std::size_t>(cur)].child[digit] = next;
      }
      cur = next;
    }
    auto& end = nodes[static_cast<std::size_t>(cur)];
    if (end.is_leaf() || end.child[0] >= 0 || end.child[1] >= 0) {
      invalid("duplicate or prefix leaf code: " + codes[i].to_string());
    }
    end.leaf = static_cast<int>(i);
  }
  for (const auto& n : nodes) {
    if (!n.is_leaf() && (n.child[0] < 0 || n.child[1] < 0)) {
      invalid("leaf codes do not form a full binary tree");
    }
  }
  return from_nodes(std::move(nodes), 0);
}

Dendrogram Dendrogram::parse_text(std::string_view text) {
  TextParser p{text, 0, {}, {}};
  const int root = p.parse_node(0);
  if (p.pos != text.size()) invalid("trailing characters at offset " + std::to_string(p.pos));
  auto d = from_nodes(std::move(p.nodes), root);
  for (std::size_t id = 0; id < p.tokens.size(); ++id) {
    const auto code = d.leaf_code(static_cast<int>(id));
    if (code.to_string() != p.tokens[id]) {
      invalid("leaf '" + p.tokens[id] + "' sits at path " + code.to_string());
    }
  }
  return d;
}

Dendrogram Dendrogram::from_shape(std::string_view shape) {
  TextParser p{shape, 0, {}, {}};
  const int root = p.parse_node(0);
  if (p.pos != shape.size()) invalid("trailing characters at offset " + std::to_string(p.pos));
  return from_nodes(std::move(p.nodes), root);
}

std::vector<int> Dendrogram::leaf_ids() const {
  std::vector<int> ids;
  ids.reserve(leaf_node_.size());
  for (const auto& [id, n] : leaf_node_) ids.push_back(id);
  return ids;
}

bool Dendrogram::has_leaf(int leaf_id) const {
  return std::binary_search(leaf_node_.begin(), leaf_node_.end(), std::pair{leaf_id, -1},
                            [](const auto& a, const auto& b) { return a.first < b.first; });
}

int Dendrogram::leaf_node(int leaf_id) const {
  auto it = std::lower_bound(leaf_node_.begin(), leaf_node_.end(), leaf_id,
                             [](const auto& a, int id) { return a.first < id; });
  if (it == leaf_node_.end() || it->first != leaf_id) {
    throw Error(ErrorKind::InvalidArgument, "unknown leaf id " + std::to_string(leaf_id));
  }
  return it->second;
}

int Dendrogram::max_leaf_id() const { return leaf_node_.back().first; }

std::size_t Dendrogram::depth(int node_index) const {
  std::size_t d = 0;
  for (int n = node(node_index).parent; n >= 0; n = node(n).parent) ++d;
  return d;
}

std::size_t Dendrogram::max_depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t best = 0;
  // Reverse post-order visits parents before children.
  const auto order = post_order(nodes_, root_);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = nodes_[static_cast<std::size_t>(*it)];
    if (n.parent >= 0) depth[static_cast<std::size_t>(*it)] = depth[static_cast<std::size_t>(n.parent)] + 1;
    best = std::max(best, depth[static_cast<std::size_t>(*it)]);
  }
  return best;
}

EdgeCode Dendrogram::code_of(int node_index) const {
  if (node_index == root_) throw Error(ErrorKind::InvalidArgument, "the root has no edge code");
  std::vector<std::uint8_t> digits;
  for (int n = node_index; node(n).parent >= 0; n = node(n).parent) {
    const auto& p = node(node(n).parent);
    digits.push_back(p.child[0] == n ? 0 : 1);
  }
  std::reverse(digits.begin(), digits.end());
  return EdgeCode(std::move(digits));
}

std::vector<EdgeCode> Dendrogram::leaf_codes() const {
  std::vector<EdgeCode> out;
  out.reserve(leaf_node_.size());
  for (const auto& [id, n] : leaf_node_) out.push_back(code_of(n));
  return out;
}

std::vector<int> Dendrogram::leaves_below(int node_index) const {
  std::vector<int> out;
  std::vector<int> stack{node_index};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    const auto& nd = node(n);
    if (nd.is_leaf()) {
      out.push_back(nd.leaf);
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Dendrogram::to_text() const {
  std::vector<std::string> text(nodes_.size());
  for (int n : post_order(nodes_, root_)) {
    const auto& nd = nodes_[static_cast<std::size_t>(n)];
    auto& out = text[static_cast<std::size_t>(n)];
    if (nd.is_leaf()) {
      out = code_of(n).to_string();
    } else {
      auto& a = text[static_cast<std::size_t>(nd.child[0])];
      auto& b = text[static_cast<std::size_t>(nd.child[1])];
      out.reserve(a.size() + b.size() + 3);
      out += '(';
      out += a;
      out += ',';
      out += b;
      out += ')';
      a.clear();
      a.shrink_to_fit();
      b.clear();
      b.shrink_to_fit();
    }
  }
  return std::move(text[static_cast<std::size_t>(root_)]);
}

bool operator==(const Dendrogram& a, const Dendrogram& b) {
  return a.leaf_ids() == b.leaf_ids() && a.leaf_codes() == b.leaf_codes();
}

CanonicalForm canonicalize(const Dendrogram& d) {
  const auto nodes = d.nodes();
  std::vector<std::string> form(nodes.size());
  for (int n : post_order(nodes, d.root())) {
    const auto& nd = nodes[static_cast<std::size_t>(n)];
    auto& out = form[static_cast<std::size_t>(n)];
    if (nd.is_leaf()) {
      out = "x";
      continue;
    }
    std::string a = std::move(form[static_cast<std::size_t>(nd.child[0])]);
    std::string b = std::move(form[static_cast<std::size_t>(nd.child[1])]);
    if (b < a) std::swap(a, b);
    out.reserve(a.size() + b.size() + 3);
    out += '(';
    out += a;
    out += ',';
    out += b;
    out += ')';
  }
  return CanonicalForm(std::move(form[static_cast<std::size_t>(d.root())]));
}

Dendrogram insert_leaf(const Dendrogram& d, int attach_node, std::uint8_t new_label) {
  if (attach_node < 0 || static_cast<std::size_t>(attach_node) >= d.node_count()) {
    throw Error(ErrorKind::InvalidAttachPoint, "no node " + std::to_string(attach_node));
  }
  if (new_label > 1) throw Error(ErrorKind::InvalidAttachPoint, "label must be 0 or 1");
  std::vector<Dendrogram::Node> nodes(d.nodes().begin(), d.nodes().end());
  const int leaf = static_cast<int>(nodes.size());
  const int split = leaf + 1;
  Dendrogram::Node new_leaf;
  new_leaf.leaf = d.max_leaf_id() + 1;
  Dendrogram::Node inner;
  inner.child[new_label] = leaf;
  inner.child[1 - new_label] = attach_node;
  nodes.push_back(new_leaf);
  nodes.push_back(inner);

  int root = d.root();
  const int parent = d.node(attach_node).parent;
  if (parent < 0) {
    root = split;
  } else {
    auto& p = nodes[static_cast<std::size_t>(parent)];
    p.child[p.child[0] == attach_node ? 0 : 1] = split;
  }
  return Dendrogram::from_nodes(std::move(nodes), root);
}

Dendrogram restrict(const Dendrogram& d, std::span<const int> keep) {
  std::set<int> kept;
  for (int id : keep) {
    if (!d.has_leaf(id)) {
      throw Error(ErrorKind::InvalidArgument, "restrict: unknown leaf id " + std::to_string(id));
    }
    kept.insert(id);
  }
  if (kept.size() < 2) throw Error(ErrorKind::TooFewLeaves, "restrict needs >= 2 leaves");

  const auto src = d.nodes();
  std::vector<Dendrogram::Node> out;
  std::vector<int> image(src.size(), -1);  // new index of each source subtree, -1 if empty
  for (int n : post_order(src, d.root())) {
    const auto& nd = src[static_cast<std::size_t>(n)];
    if (nd.is_leaf()) {
      if (kept.count(nd.leaf)) {
        Dendrogram::Node leaf;
        leaf.leaf = nd.leaf;
        image[static_cast<std::size_t>(n)] = static_cast<int>(out.size());
        out.push_back(leaf);
      }
      continue;
    }
    const int a = image[static_cast<std::size_t>(nd.child[0])];
    const int b = image[static_cast<std::size_t>(nd.child[1])];
    if (a >= 0 && b >= 0) {
      Dendrogram::Node inner;
      inner.child = {a, b};
      image[static_cast<std::size_t>(n)] = static_cast<int>(out.size());
      out.push_back(inner);
    } else {
      image[static_cast<std::size_t>(n)] = a >= 0 ? a : b;  // contract unary node
    }
  }
  return Dendrogram::from_nodes(std::move(out), image[static_cast<std::size_t>(d.root())]);
}

}  // namespace dht
