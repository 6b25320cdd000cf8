#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dht/dendrogram.hpp"
#include "dht/ingest.hpp"
#include "dht/kernels.hpp"

namespace dht {

/// Four structural coordinates of a dendrogram. Shape-equal dendrograms get
/// equal descriptors; distinct shapes may collide, so identity is always
/// decided by CanonicalForm.
struct ThetaDescriptor {
  double leaf_count = 0;
  double max_depth = 0;
  double mean_distance = 0;  // mean 2-adic distance over leaf pairs
  double depth_entropy = 0;  // Shannon entropy (bits) of the leaf-depth distribution

  std::array<double, 4> coordinates() const {
    return {leaf_count, max_depth, mean_distance, depth_entropy};
  }
  friend bool operator==(const ThetaDescriptor&, const ThetaDescriptor&) = default;
};

using DescriptorFn = std::function<ThetaDescriptor(const Dendrogram&)>;

ThetaDescriptor theta_descriptor(const Dendrogram& d);

enum class Relation { Identical, Timelike, Spacelike };
enum class Direction { Forward, Backward, None };

std::string_view to_string(Relation r);
std::string_view to_string(Direction d);

struct CausalVerdict {
  Relation relation = Relation::Spacelike;
  Direction direction = Direction::None;
  std::optional<std::vector<int>> witness;  // leaf ids of the larger dendrogram
};

/// Leaf ids of `big` whose restriction has the shape of `small`, or nullopt.
/// Polynomial: dynamic programming over (small node, big node) pairs.
std::optional<std::vector<int>> find_restriction(const Dendrogram& small, const Dendrogram& big);

/// Identical when the shapes and leaf counts agree. Otherwise the smaller
/// dendrogram (d1 when e1 <= e2; Direction::Backward when the arguments had to
/// be swapped) timelike-precedes the larger one iff it is a restriction of it.
CausalVerdict is_timelike(const Dendrogram& d1, const Dendrogram& d2);

struct Cone {
  /// layers[k]: shapes reached with exactly k insertions, sorted.
  std::vector<std::vector<CanonicalForm>> layers;
  /// (parent, child) single-insertion transitions between consecutive layers.
  std::vector<std::pair<CanonicalForm, CanonicalForm>> edges;
  bool truncated = false;

  /// Union of all layers (reachable with <= steps insertions), sorted.
  std::vector<CanonicalForm> members() const;
  std::size_t size() const;
  bool contains(const CanonicalForm& f) const;
  std::string to_dot() const;
};

/// Every shape reachable by at most `steps` single-leaf insertions at any
/// edge. Expansion stops with truncated = true once the member count would
/// exceed `cap`.
Cone future_cone(const Dendrogram& d, std::size_t steps, std::size_t cap,
                 kernels::Exec exec = kernels::Exec::Parallel);

struct EnsembleClassification {
  std::vector<CanonicalForm> forms;
  std::vector<ThetaDescriptor> descriptors;
  std::vector<std::vector<CausalVerdict>> matrix;  // matrix[i][j] = is_timelike(d_i, d_j)
  double identical_fraction = 0;                   // over unordered pairs i < j
  double timelike_fraction = 0;
  double spacelike_fraction = 0;
  std::vector<std::size_t> future_count;  // members d_i forward-precedes
  std::vector<std::size_t> past_count;    // members that forward-precede d_i
};

/// Throws Error(InvalidArgument) for fewer than two dendrograms.
EnsembleClassification classify_ensemble(std::span<const Dendrogram> dendrograms,
                                         kernels::Exec exec = kernels::Exec::Parallel,
                                         const DescriptorFn& descriptor = theta_descriptor);

/// Re-clustering view of event collection: compares the dendrogram of the
/// first k events with that of the first k+1 events for every k >= 2.
struct TransitionCheck {
  std::size_t from_events = 0;
  CanonicalForm from, to;
  CausalVerdict verdict;
  bool insertion_reachable() const {
    return verdict.relation == Relation::Timelike && verdict.direction == Direction::Forward;
  }
};

std::vector<TransitionCheck> recluster_transitions(std::span<const EventRecord> events,
                                                   const LinkageSpec& spec);

}  // namespace dht
