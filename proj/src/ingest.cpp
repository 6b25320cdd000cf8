#include "dht/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "dht/error.hpp"
#include "dht/kernels.hpp"

namespace dht {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Chebyshev: return "chebyshev";
  }
  return "?";
}

std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "?";
}

std::string_view to_string(TieBreak) { return "smallest-member-index"; }

Metric parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::Euclidean;
  if (s == "manhattan") return Metric::Manhattan;
  if (s == "chebyshev") return Metric::Chebyshev;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(s) + "'");
}

Linkage parse_linkage(std::string_view s) {
  if (s == "single") return Linkage::Single;
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  throw Error(ErrorKind::InvalidArgument, "unknown linkage '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t row, std::size_t col, const std::string& why) {
  std::string where = "row " + std::to_string(row);
  if (col > 0) where += ", column " + std::to_string(col);
  throw Error(ErrorKind::ParseError, where + ": " + why);
}

std::vector<double> parse_row(std::string_view line, std::size_t row) {
  std::vector<double> cells;
  std::size_t col = 0;
  while (true) {
    ++col;
    const auto comma = line.find(',');
    const auto cell = trim(line.substr(0, comma));
    if (cell.empty()) parse_error(row, col, "empty cell");
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      parse_error(row, col, "not a number: '" + std::string(cell) + "'");
    }
    if (!std::isfinite(v)) parse_error(row, col, "non-finite value");
    cells.push_back(v);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return cells;
}

}  // namespace

std::vector<EventRecord> load_events(std::istream& in, const LoadOptions& options) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  const std::size_t first = options.header ? 1 : 0;
  if (lines.size() <= first) throw Error(ErrorKind::ParseError, "no data rows");

  std::vector<EventRecord> records;
  std::map<std::vector<double>, std::size_t> seen;
  for (std::size_t r = first; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (trim(lines[r]).empty()) parse_error(row, 0, "blank line");
    EventRecord rec{records.size(), parse_row(lines[r], row)};
    if (!records.empty() && rec.features.size() != records.front().features.size()) {
      parse_error(row, 0,
                  "expected " + std::to_string(records.front().features.size()) + " columns, got " +
                      std::to_string(rec.features.size()));
    }
    if (auto it = seen.find(rec.features); it != seen.end()) {
      if (options.duplicates == DuplicatePolicy::Reject) {
        throw Error(ErrorKind::DuplicateEvent, "row " + std::to_string(row) +
                                                   " repeats event " + std::to_string(it->second));
      }
      const double jitter = std::ldexp(static_cast<double>(rec.id), -30);
      for (auto& f : rec.features) f += jitter;
      if (seen.count(rec.features)) {
        throw Error(ErrorKind::DuplicateEvent,
                    "row " + std::to_string(row) + " still duplicates an event after jitter");
      }
    }
    seen.emplace(rec.features, rec.id);
    records.push_back(std::move(rec));
  }
  return records;
}

double feature_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    switch (metric) {
      case Metric::Euclidean: acc += d * d; break;
      case Metric::Manhattan: acc += d; break;
      case Metric::Chebyshev: acc = std::max(acc, d); break;
    }
  }
  return metric == Metric::Euclidean ? std::sqrt(acc) : acc;
}

Dendrogram agglomerate(std::span<const EventRecord> events, const LinkageSpec& spec) {
  if (events.size() < 2) throw Error(ErrorKind::TooFewEvents, "need at least two events");
  const auto width = events.front().features.size();
  if (width == 0) throw Error(ErrorKind::InvalidArgument, "events need at least one feature");
  for (const auto& e : events) {
    if (e.features.size() != width) throw Error(ErrorKind::InvalidArgument, "ragged feature vectors");
  }
  return agglomerate(kernels::distance_matrix(events, spec.metric), events.size(), spec.linkage);
}

Dendrogram agglomerate(const DistanceMatrix& distances, std::size_t n, Linkage linkage) {
  if (n < 2) throw Error(ErrorKind::TooFewEvents, "need at least two events");
  if (distances.size() != n * n) throw Error(ErrorKind::InvalidArgument, "distance matrix size");

  // Cluster slots are indexed by their smallest member, so scanning slots in
  // ascending (i, j) order with strict comparisons realizes the tie-break.
  DistanceMatrix d = distances;
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };
  std::vector<char> active(n, 1);
  std::vector<std::size_t> size(n, 1);
  std::vector<int> node_of(n);
  std::vector<Dendrogram::Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].leaf = static_cast<int>(i);
    node_of[i] = static_cast<int>(i);
  }

  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> nn(n, none);
  std::vector<double> nd(n, std::numeric_limits<double>::infinity());
  auto recompute = [&](std::size_t i) {
    nn[i] = none;
    nd[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && (nn[i] == none || at(i, j) < nd[i])) {
        nn[i] = j;
        nd[i] = at(i, j);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) recompute(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = none;
    for (std::size_t k = 0; k < n; ++k) {
      if (active[k] && nn[k] != none && (i == none || nd[k] < nd[i])) i = k;
    }
    DHT_ENSURE(i != none, "agglomerate: no mergeable pair");
    const std::size_t j = nn[i];

    Dendrogram::Node merged;
    merged.child = {node_of[i], node_of[j]};
    node_of[i] = static_cast<int>(nodes.size());
    nodes.push_back(merged);

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single: v = std::min(at(i, k), at(j, k)); break;
        case Linkage::Complete: v = std::max(at(i, k), at(j, k)); break;
        case Linkage::Average:
          v = (static_cast<double>(size[i]) * at(i, k) + static_cast<double>(size[j]) * at(j, k)) /
              static_cast<double>(size[i] + size[j]);
          break;
      }
      at(i, k) = v;
      at(k, i) = v;
    }
    active[j] = 0;
    size[i] += size[j];

    recompute(i);
    for (std::size_t k = 0; k < i; ++k) {
      if (!active[k]) continue;
      if (nn[k] == i || nn[k] == j) {
        recompute(k);
      } else if (at(k, i) < nd[k] || (at(k, i) == nd[k] && i < nn[k])) {
        nn[k] = i;
        nd[k] = at(k, i);
      }
    }
    for (std::size_t k = i + 1; k < j; ++k) {
      if (active[k] && nn[k] == j) recompute(k);
    }
  }
  return Dendrogram::from_nodes(std::move(nodes), node_of[0]);
}

Dendrogram label_2adic(const Dendrogram& merge_tree) {
  std::vector<Dendrogram::Node> nodes(merge_tree.nodes().begin(), merge_tree.nodes().end());
  std::vector<int> min_leaf(nodes.size(), std::numeric_limits<int>::max());
  // Children are visited before parents when walking in reverse BFS order.
  std::vector<int> order{merge_tree.root()};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& n = nodes[static_cast<std::size_t>(order[k])];
    if (!n.is_leaf()) {
      order.push_back(n.child[0]);
      order.push_back(n.child[1]);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& n = nodes[static_cast<std::size_t>(*it)];
    if (n.is_leaf()) {
      min_leaf[static_cast<std::size_t>(*it)] = n.leaf;
      continue;
    }
    const int a = min_leaf[static_cast<std::size_t>(n.child[0])];
    const int b = min_leaf[static_cast<std::size_t>(n.child[1])];
    if (b < a) std::swap(n.child[0], n.child[1]);
    min_leaf[static_cast<std::size_t>(*it)] = std::min(a, b);
  }
  return Dendrogram::from_nodes(std::move(nodes), merge_tree.root());
}

}  // namespace dht
