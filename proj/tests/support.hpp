#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "dht/dendrogram.hpp"
#include "dht/rational.hpp"

namespace testing {

inline std::string random_shape(std::size_t leaves, std::mt19937_64& rng) {
  if (leaves == 1) return "x";
  const std::size_t left = 1 + rng() % (leaves - 1);
  return "(" + random_shape(left, rng) + "," + random_shape(leaves - left, rng) + ")";
}

/// Same tree with the children of every internal node swapped with probability 1/2.
inline dht::Dendrogram random_swaps(const dht::Dendrogram& d, std::mt19937_64& rng) {
  std::vector<dht::Dendrogram::Node> nodes(d.nodes().begin(), d.nodes().end());
  for (auto& n : nodes) {
    if (!n.is_leaf() && (rng() & 1U)) std::swap(n.child[0], n.child[1]);
  }
  return dht::Dendrogram::from_nodes(std::move(nodes), d.root());
}

inline dht::Dendrogram random_dendrogram(std::size_t leaves, std::mt19937_64& rng) {
  return random_swaps(dht::Dendrogram::from_shape(random_shape(leaves, rng)), rng);
}

/// m distinct values k / 2^bits, k < 2^bits.
inline std::vector<dht::DyadicRational> random_events(std::size_t m, unsigned bits, std::mt19937_64& rng) {
  std::vector<dht::DyadicRational> out;
  while (out.size() < m) {
    dht::DyadicRational v(dht::BigInt(static_cast<unsigned long>(rng() >> (64 - bits))), bits);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace testing
