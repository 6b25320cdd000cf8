#include "dht/causal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dht/error.hpp"

namespace dht {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Identical: return "identical";
    case Relation::Timelike: return "timelike";
    case Relation::Spacelike: return "spacelike";
  }
  return "?";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Forward: return "forward";
    case Direction::Backward: return "backward";
    case Direction::None: return "n/a";
  }
  return "?";
}

ThetaDescriptor theta_descriptor(const Dendrogram& d) {
  const auto codes = d.leaf_codes();
  ThetaDescriptor t;
  t.leaf_count = static_cast<double>(codes.size());
  t.max_depth = static_cast<double>(d.max_depth());

  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    for (std::size_t j = i + 1; j < codes.size(); ++j) {
      sum += padic_distance(codes[i], codes[j]).to_double();
      ++pairs;
    }
  }
  t.mean_distance = sum / static_cast<double>(pairs);

  std::map<std::size_t, std::size_t> depth_counts;
  for (const auto& c : codes) ++depth_counts[c.depth()];
  double h = 0.0;
  for (const auto& [depth, n] : depth_counts) {
    const double p = static_cast<double>(n) / static_cast<double>(codes.size());
    h -= p * std::log2(p);
  }
  t.depth_entropy = h == 0.0 ? 0.0 : h;  // avoid -0
  return t;
}

namespace {

std::vector<int> post_order_of(const Dendrogram& d) {
  std::vector<int> order{d.root()};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& n = d.node(order[k]);
    if (!n.is_leaf()) {
      order.push_back(n.child[0]);
      order.push_back(n.child[1]);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> leaf_counts(const Dendrogram& d, std::span<const int> order) {
  std::vector<std::size_t> count(d.node_count(), 0);
  for (int n : order) {
    const auto& node = d.node(n);
    count[static_cast<std::size_t>(n)] =
        node.is_leaf() ? 1
                       : count[static_cast<std::size_t>(node.child[0])] +
                             count[static_cast<std::size_t>(node.child[1])];
  }
  return count;
}

}  // namespace

std::optional<std::vector<int>> find_restriction(const Dendrogram& small, const Dendrogram& big) {
  if (small.leaf_count() > big.leaf_count()) return std::nullopt;
  const auto s_order = post_order_of(small);
  const auto b_order = post_order_of(big);
  const auto s_leaves = leaf_counts(small, s_order);
  const auto b_leaves = leaf_counts(big, b_order);
  const std::size_t nb = big.node_count();

  // fits[s * nb + b]: the subtree shape at small-node s is the restriction of
  // some leaf subset of the big subtree rooted at b.
  std::vector<char> fits(small.node_count() * nb, 0);
  auto at = [&](int s, int b) -> char& {
    return fits[static_cast<std::size_t>(s) * nb + static_cast<std::size_t>(b)];
  };
  for (int s : s_order) {
    const auto& sn = small.node(s);
    for (int b : b_order) {
      if (sn.is_leaf()) {
        at(s, b) = 1;
        continue;
      }
      const auto& bn = big.node(b);
      if (bn.is_leaf() || s_leaves[static_cast<std::size_t>(s)] > b_leaves[static_cast<std::size_t>(b)]) {
        continue;
      }
      const int s0 = sn.child[0], s1 = sn.child[1];
      const int b0 = bn.child[0], b1 = bn.child[1];
      at(s, b) = at(s, b0) || at(s, b1) || (at(s0, b0) && at(s1, b1)) || (at(s0, b1) && at(s1, b0));
    }
  }
  if (!at(small.root(), big.root())) return std::nullopt;

  std::vector<int> witness;
  std::vector<std::pair<int, int>> stack{{small.root(), big.root()}};
  while (!stack.empty()) {
    auto [s, b] = stack.back();
    stack.pop_back();
    const auto& sn = small.node(s);
    if (sn.is_leaf()) {
      witness.push_back(big.leaves_below(b).front());
      continue;
    }
    const auto& bn = big.node(b);
    const int s0 = sn.child[0], s1 = sn.child[1];
    const int b0 = bn.child[0], b1 = bn.child[1];
    if (at(s0, b0) && at(s1, b1)) {
      stack.emplace_back(s0, b0);
      stack.emplace_back(s1, b1);
    } else if (at(s0, b1) && at(s1, b0)) {
      stack.emplace_back(s0, b1);
      stack.emplace_back(s1, b0);
    } else {
      stack.emplace_back(s, at(s, b0) ? b0 : b1);
    }
  }
  std::sort(witness.begin(), witness.end());
  return witness;
}

CausalVerdict is_timelike(const Dendrogram& d1, const Dendrogram& d2) {
  const bool swapped = d1.leaf_count() > d2.leaf_count();
  const Dendrogram& small = swapped ? d2 : d1;
  const Dendrogram& big = swapped ? d1 : d2;
  CausalVerdict v;
  if (small.leaf_count() == big.leaf_count()) {
    v.relation = canonicalize(small) == canonicalize(big) ? Relation::Identical : Relation::Spacelike;
    return v;
  }
  if (auto w = find_restriction(small, big)) {
    DHT_ENSURE(canonicalize(restrict(big, *w)) == canonicalize(small), "restriction witness is wrong");
    v.relation = Relation::Timelike;
    v.direction = swapped ? Direction::Backward : Direction::Forward;
    v.witness = std::move(w);
  }
  return v;
}

// ---------------------------------------------------------------------------

std::vector<CanonicalForm> Cone::members() const {
  std::vector<CanonicalForm> all;
  for (const auto& layer : layers) all.insert(all.end(), layer.begin(), layer.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t Cone::size() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.size();
  return n;
}

bool Cone::contains(const CanonicalForm& f) const {
  for (const auto& layer : layers) {
    if (std::binary_search(layer.begin(), layer.end(), f)) return true;
  }
  return false;
}

std::string Cone::to_dot() const {
  std::map<CanonicalForm, std::size_t> id;
  std::ostringstream out;
  out << "digraph cone {\n";
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (const auto& f : layers[k]) {
      const auto n = id.size();
      id.emplace(f, n);
      out << "  n" << n << " [label=\"" << f.str() << "\", layer=" << k << "];\n";
    }
  }
  for (const auto& [a, b] : edges) out << "  n" << id.at(a) << " -> n" << id.at(b) << ";\n";
  out << "}\n";
  return out.str();
}

Cone future_cone(const Dendrogram& d, std::size_t steps, std::size_t cap, kernels::Exec exec) {
  if (cap == 0) throw Error(ErrorKind::InvalidArgument, "cone cap must be >= 1");
  Cone cone;
  cone.layers.push_back({canonicalize(d)});
  std::size_t total = 1;
  for (std::size_t step = 1; step <= steps; ++step) {
    // Insertion reachability depends only on shape, so each layer is expanded
    // from canonical representatives.
    const auto& frontier = cone.layers.back();
    const auto n = static_cast<std::ptrdiff_t>(frontier.size());
    std::vector<std::vector<CanonicalForm>> children(frontier.size());
    auto expand = [&](std::ptrdiff_t i) {
      const auto tree = Dendrogram::from_shape(frontier[static_cast<std::size_t>(i)].str());
      std::set<CanonicalForm> seen;
      for (std::size_t node = 0; node < tree.node_count(); ++node) {
        seen.insert(canonicalize(insert_leaf(tree, static_cast<int>(node), 1)));
      }
      children[static_cast<std::size_t>(i)].assign(seen.begin(), seen.end());
    };
    if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n; ++i) expand(i);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) expand(i);
    }

    std::set<CanonicalForm> next;
    for (const auto& c : children) next.insert(c.begin(), c.end());
    if (total + next.size() > cap) {
      cone.truncated = true;
      break;
    }
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (const auto& c : children[i]) cone.edges.emplace_back(frontier[i], c);
    }
    total += next.size();
    cone.layers.emplace_back(next.begin(), next.end());
  }
  return cone;
}

// ---------------------------------------------------------------------------

EnsembleClassification classify_ensemble(std::span<const Dendrogram> dendrograms,
                                         kernels::Exec exec, const DescriptorFn& descriptor) {
  const auto n = dendrograms.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "classification needs >= 2 dendrograms");
  EnsembleClassification out;
  for (const auto& d : dendrograms) {
    out.forms.push_back(canonicalize(d));
    out.descriptors.push_back(descriptor(d));
  }
  out.matrix.assign(n, std::vector<CausalVerdict>(n));
  const auto rows = static_cast<std::ptrdiff_t>(n);
  auto fill_row = [&](std::ptrdiff_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.matrix[static_cast<std::size_t>(i)][j] =
          is_timelike(dendrograms[static_cast<std::size_t>(i)], dendrograms[j]);
    }
  };
  if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(i);
  }

  out.future_count.assign(n, 0);
  out.past_count.assign(n, 0);
  std::size_t identical = 0, timelike = 0, spacelike = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = out.matrix[i][j];
      if (i != j && v.relation == Relation::Timelike && v.direction == Direction::Forward) {
        ++out.future_count[i];
        ++out.past_count[j];
      }
      if (j <= i) continue;
      switch (v.relation) {
        case Relation::Identical: ++identical; break;
        case Relation::Timelike: ++timelike; break;
        case Relation::Spacelike: ++spacelike; break;
      }
    }
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  out.identical_fraction = static_cast<double>(identical) / pairs;
  out.timelike_fraction = static_cast<double>(timelike) / pairs;
  out.spacelike_fraction = static_cast<double>(spacelike) / pairs;
  return out;
}

std::vector<TransitionCheck> recluster_transitions(std::span<const EventRecord> events,
                                                   const LinkageSpec& spec) {
  if (events.size() < 3) throw Error(ErrorKind::TooFewEvents, "transition check needs >= 3 events");
  std::vector<TransitionCheck> out;
  Dendrogram prev = agglomerate(events.first(2), spec);
  for (std::size_t k = 2; k < events.size(); ++k) {
    Dendrogram next = agglomerate(events.first(k + 1), spec);
    TransitionCheck t;
    t.from_events = k;
    t.from = canonicalize(prev);
    t.to = canonicalize(next);
    t.verdict = is_timelike(prev, next);
    out.push_back(std::move(t));
    prev = std::move(next);
  }
  return out;
}

}  // namespace dht
