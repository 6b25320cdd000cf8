#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dht/edge_code.hpp"

namespace dht {

/// Encoding of an unordered binary tree shape. A leaf is "x"; an internal node
/// is "(A,B)" with A <= B, so child swaps never change the string.
class CanonicalForm {
 public:
  CanonicalForm() = default;
  explicit CanonicalForm(std::string text) : text_(std::move(text)) {}

  const std::string& str() const noexcept { return text_; }
  std::size_t leaf_count() const;

  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
  friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;

 private:
  std::string text_;
};

/// A finite rooted binary tree whose leaves are events. Child slot 0 is the
/// branch answered "0", slot 1 the branch answered "1"; each leaf's EdgeCode is
/// its root-to-leaf slot sequence. Leaves carry stable integer ids, which are
/// preserved by insert_leaf and restrict.
///
/// Immutable after construction.
class Dendrogram {
 public:
  struct Node {
    std::array<int, 2> child{-1, -1};
    int parent = -1;
    int leaf = -1;  // leaf id, or -1 for an internal node

    bool is_leaf() const { return leaf >= 0; }
  };

  /// Leaf i (id i) receives codes[i]. The codes must be distinct, prefix-free
  /// and cover a full binary tree. Throws Error(InvalidDendrogram).
  static Dendrogram from_leaf_codes(std::span<const EdgeCode> codes);

  /// Nested-parenthesis text such as "((00,01),1)". Each leaf token must equal
  /// its path. Leaf ids follow left-to-right order of appearance.
  static Dendrogram parse_text(std::string_view text);

  /// Any tree with the given shape; leaf ids assigned left to right. Accepts
  /// non-sorted encodings as well, e.g. "(x,(x,x))".
  static Dendrogram from_shape(std::string_view shape);

  /// Validates structure; leaf ids must be distinct and non-negative.
  static Dendrogram from_nodes(std::vector<Node> nodes, int root);

  std::size_t leaf_count() const noexcept { return leaf_node_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  int root() const noexcept { return root_; }
  const Node& node(int index) const { return nodes_.at(static_cast<std::size_t>(index)); }
  std::span<const Node> nodes() const noexcept { return nodes_; }

  /// Ascending.
  std::vector<int> leaf_ids() const;
  bool has_leaf(int leaf_id) const;
  int leaf_node(int leaf_id) const;
  int max_leaf_id() const;

  std::size_t depth(int node_index) const;
  std::size_t max_depth() const;
  EdgeCode code_of(int node_index) const;
  EdgeCode leaf_code(int leaf_id) const { return code_of(leaf_node(leaf_id)); }
  /// In ascending leaf id order.
  std::vector<EdgeCode> leaf_codes() const;
  /// Leaf ids below a node, ascending.
  std::vector<int> leaves_below(int node_index) const;

  std::string to_text() const;

  /// Equal leaf ids with equal codes.
  friend bool operator==(const Dendrogram& a, const Dendrogram& b);

 private:
  Dendrogram() = default;
  void index_leaves();

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::pair<int, int>> leaf_node_;  // (leaf id, node index) sorted by id
};

CanonicalForm canonicalize(const Dendrogram& d);

/// Splits the edge entering `attach_node` (the root counts: a new root is
/// created above it) with a new internal node. The new leaf takes child slot
/// `new_label`, the old subtree the other slot. The new leaf id is
/// max_leaf_id() + 1. Throws Error(InvalidAttachPoint).
Dendrogram insert_leaf(const Dendrogram& d, int attach_node, std::uint8_t new_label);

/// Deletes every leaf not in `keep` and contracts the resulting unary nodes.
/// Surviving leaves keep their ids and relative slot order.
/// Throws Error(TooFewLeaves) for |keep| < 2, Error(InvalidArgument) for an
/// unknown leaf id.
Dendrogram restrict(const Dendrogram& d, std::span<const int> keep);

}  // namespace dht
