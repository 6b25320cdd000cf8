#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dht/dendrogram.hpp"

namespace dht {

struct EventRecord {
  std::size_t id = 0;
  std::vector<double> features;
};

enum class Metric { Euclidean, Manhattan, Chebyshev };
enum class Linkage { Single, Complete, Average };

/// Equal linkage distances are resolved by merging the pair whose smaller
/// cluster-minimum index is smallest, then the larger one. This is the only
/// supported rule; it is kept as a field so it shows up in run manifests.
enum class TieBreak { SmallestMemberIndex };

struct LinkageSpec {
  Metric metric = Metric::Euclidean;
  Linkage linkage = Linkage::Average;
  TieBreak tie_break = TieBreak::SmallestMemberIndex;
};

std::string_view to_string(Metric m);
std::string_view to_string(Linkage l);
std::string_view to_string(TieBreak t);
Metric parse_metric(std::string_view s);
Linkage parse_linkage(std::string_view s);

enum class DuplicatePolicy { Reject, Jitter };

struct LoadOptions {
  bool header = false;
  DuplicatePolicy duplicates = DuplicatePolicy::Reject;
};

/// One event per row, numeric cells, '.' decimal separator.
/// Throws Error(ParseError) naming the row (1-based, header included) and
/// column, or Error(DuplicateEvent). Under DuplicatePolicy::Jitter a repeated
/// row i gets 2^-30 * i added to every feature.
std::vector<EventRecord> load_events(std::istream& in, const LoadOptions& options = {});

/// Condensed-free full n x n matrix, row-major.
using DistanceMatrix = std::vector<double>;

double feature_distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// Agglomerative hierarchical clustering into a strictly binary merge tree.
/// Leaf ids are event indices and the tree is labeled by label_2adic.
/// Throws Error(TooFewEvents) for fewer than two events.
Dendrogram agglomerate(std::span<const EventRecord> events, const LinkageSpec& spec);

/// Same, from a precomputed n x n distance matrix.
Dendrogram agglomerate(const DistanceMatrix& distances, std::size_t n, Linkage linkage);

/// At each internal node the child holding the smallest event index gets
/// digit 0, the other digit 1. Idempotent.
Dendrogram label_2adic(const Dendrogram& merge_tree);

}  // namespace dht
