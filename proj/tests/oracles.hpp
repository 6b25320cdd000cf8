#pragma once

// Reference implementations used only by tests. They work on plain strings,
// vectors and GMP numbers and deliberately share no code with the library.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace oracle {

// ---------------------------------------------------------------------------
// Tree shapes as strings: a leaf is any token without parentheses, an
// internal node is "(L,R)".

inline std::pair<std::string_view, std::string_view> split_top(std::string_view s) {
  int depth = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == ',' && depth == 0) return {s.substr(1, i - 1), s.substr(i + 1, s.size() - i - 2)};
  }
  return {};
}

inline bool is_leaf(std::string_view s) { return s.empty() || s.front() != '('; }

inline std::string canon(std::string_view s) {
  if (is_leaf(s)) return "x";
  auto [l, r] = split_top(s);
  auto a = canon(l), b = canon(r);
  if (b < a) std::swap(a, b);
  return "(" + a + "," + b + ")";
}

inline std::size_t leaves(std::string_view s) {
  if (is_leaf(s)) return 1;
  auto [l, r] = split_top(s);
  return leaves(l) + leaves(r);
}

/// Every shape with n leaves, by combining smaller shapes.
inline const std::set<std::string>& shapes_with(std::size_t n) {
  static std::map<std::size_t, std::set<std::string>> memo;
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  std::set<std::string> out;
  if (n == 1) {
    out.insert("x");
  } else {
    for (std::size_t a = 1; a <= n / 2; ++a) {
      for (const auto& sa : shapes_with(a)) {
        for (const auto& sb : shapes_with(n - a)) out.insert(canon("(" + sa + "," + sb + ")"));
      }
    }
  }
  return memo.emplace(n, std::move(out)).first->second;
}

/// Shapes obtained by hanging one new leaf above any subtree.
inline std::vector<std::string> insertions_raw(std::string_view s) {
  std::vector<std::string> out{"(" + std::string(s) + ",x)"};
  if (is_leaf(s)) return out;
  auto [l, r] = split_top(s);
  for (const auto& v : insertions_raw(l)) out.push_back("(" + v + "," + std::string(r) + ")");
  for (const auto& v : insertions_raw(r)) out.push_back("(" + std::string(l) + "," + v + ")");
  return out;
}

inline std::set<std::string> one_insertion(std::string_view s) {
  std::set<std::string> out;
  for (const auto& v : insertions_raw(s)) out.insert(canon(v));
  return out;
}

/// Breadth-first search over single-leaf insertions.
inline bool reachable_by_insertion(std::string_view from, std::string_view to) {
  const auto n_from = leaves(from), n_to = leaves(to);
  if (n_to <= n_from) return false;
  std::set<std::string> layer{canon(from)};
  for (std::size_t step = n_from; step < n_to; ++step) {
    std::set<std::string> next;
    for (const auto& s : layer) {
      auto grown = one_insertion(s);
      next.insert(grown.begin(), grown.end());
    }
    layer = std::move(next);
  }
  return layer.contains(canon(to));
}

/// Deletes the leaves whose left-to-right index is not in `keep` and
/// contracts unary nodes.
inline std::optional<std::string> restrict_shape(std::string_view s, std::uint32_t keep, std::size_t& next) {
  if (is_leaf(s)) {
    const bool kept = (keep >> next++) & 1U;
    return kept ? std::optional<std::string>("x") : std::nullopt;
  }
  auto [l, r] = split_top(s);
  auto a = restrict_shape(l, keep, next);
  auto b = restrict_shape(r, keep, next);
  if (a && b) return "(" + *a + "," + *b + ")";
  return a ? a : b;
}

/// Exhaustive search over leaf subsets of `big` with as many leaves as `small`.
inline bool restriction_exists(std::string_view small, std::string_view big) {
  const auto n = leaves(big), k = leaves(small);
  if (k > n) return false;
  const auto target = canon(small);
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::size_t next = 0;
    auto r = restrict_shape(big, mask, next);
    if (r && canon(*r) == target) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Agglomerative clustering by brute force: every step rescans all cluster
// pairs and recomputes linkage distances from the member lists.

enum class Link { Single, Complete, Average };

/// Leaf codes ("0"/"1" strings, root first) by event index. The child whose
/// smallest member is smaller takes digit 0; equal distances merge the pair
/// with the lexicographically smallest (min member, min member).
inline std::vector<std::string> brute_agglomerate(const std::vector<std::vector<double>>& dist, Link link) {
  const std::size_t n = dist.size();
  struct Node {
    std::vector<std::size_t> members;
    int child0 = -1, child1 = -1;
  };
  std::vector<Node> nodes;
  std::vector<int> active;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({{i}, -1, -1});
    active.push_back(static_cast<int>(i));
  }
  auto linkage = [&](const Node& a, const Node& b) {
    double best = link == Link::Single ? 1e300 : (link == Link::Complete ? -1.0 : 0.0);
    for (auto i : a.members) {
      for (auto j : b.members) {
        const double d = dist[i][j];
        if (link == Link::Single) best = std::min(best, d);
        else if (link == Link::Complete) best = std::max(best, d);
        else best += d;
      }
    }
    if (link == Link::Average) best /= static_cast<double>(a.members.size() * b.members.size());
    return best;
  };
  while (active.size() > 1) {
    std::sort(active.begin(), active.end(), [&](int a, int b) {
      return nodes[static_cast<std::size_t>(a)].members.front() < nodes[static_cast<std::size_t>(b)].members.front();
    });
    std::size_t bi = 0, bj = 1;
    double bd = linkage(nodes[static_cast<std::size_t>(active[0])], nodes[static_cast<std::size_t>(active[1])]);
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double d = linkage(nodes[static_cast<std::size_t>(active[i])], nodes[static_cast<std::size_t>(active[j])]);
        if (d < bd) {
          bd = d;
          bi = i;
          bj = j;
        }
      }
    }
    Node merged;
    merged.child0 = active[bi];
    merged.child1 = active[bj];
    merged.members = nodes[static_cast<std::size_t>(active[bi])].members;
    for (auto m : nodes[static_cast<std::size_t>(active[bj])].members) merged.members.push_back(m);
    std::sort(merged.members.begin(), merged.members.end());
    nodes.push_back(std::move(merged));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    active.push_back(static_cast<int>(nodes.size() - 1));
  }
  std::vector<std::string> codes(n);
  std::vector<std::pair<int, std::string>> stack{{active.front(), ""}};
  while (!stack.empty()) {
    auto [node, path] = stack.back();
    stack.pop_back();
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    if (nd.child0 < 0) {
      codes[nd.members.front()] = path;
      continue;
    }
    stack.emplace_back(nd.child0, path + "0");
    stack.emplace_back(nd.child1, path + "1");
  }
  return codes;
}

// ---------------------------------------------------------------------------
// Numbers

/// 2-adic valuation of a nonzero integer.
inline std::size_t valuation2(const mpz_class& z) { return mpz_scan1(z.get_mpz_t(), 0); }

/// sum_j digit_j 2^j for a root-first digit string.
inline mpz_class code_integer(std::string_view digits) {
  mpz_class v = 0;
  for (std::size_t j = digits.size(); j-- > 0;) v = v * 2 + (digits[j] - '0');
  return v;
}

/// sum_j digit_j 2^{-j-1}.
inline mpq_class code_monna(std::string_view digits) {
  mpq_class v = 0, w(1, 2);
  for (char c : digits) {
    if (c == '1') v += w;
    w /= 2;
  }
  return v;
}

/// (1/(m(m-1))) sum_{i != k} (e_i - e_k)^2
inline mpq_class ordered_energy(const std::vector<mpq_class>& e) {
  mpq_class sum = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (i != k) sum += (e[i] - e[k]) * (e[i] - e[k]);
    }
  }
  return sum / mpq_class(static_cast<unsigned long>(e.size() * (e.size() - 1)));
}

}  // namespace oracle
