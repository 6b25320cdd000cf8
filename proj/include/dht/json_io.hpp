#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dht/causal.hpp"
#include "dht/dendrogram.hpp"
#include "dht/emergence.hpp"
#include "dht/ensemble.hpp"

namespace dht::io {

// Insertion-ordered so that written files read top-down in a fixed layout.
using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form.
std::string format_double(double v);

struct DendrogramDoc {
  std::optional<Dendrogram> dendrogram;
  std::optional<std::vector<DyadicRational>> events;

  /// The explicit event list when present, else the Monna values of the
  /// leaves in ascending id order.
  std::vector<DyadicRational> emergence_events() const;
};

/// {"leaves": [codes by ascending leaf id], "canonical", "text", "theta"} plus
/// "events" when given.
Json dendrogram_json(const Dendrogram& d, std::span<const DyadicRational> events = {});

/// Accepts "leaves", "events" or both. Leaf ids are renumbered 0..k-1 in list
/// order. Throws Error(ParseError) or the dendrogram's own validation errors.
DendrogramDoc parse_dendrogram(const Json& j);

Json theta_json(const ThetaDescriptor& t);
Json verdict_json(const CausalVerdict& v);
Json cone_json(const Cone& cone, std::size_t steps, std::size_t cap);
Json classification_json(const EnsembleClassification& c);
Json summary_json(const EmergenceSummary& s);
Json observer_json(const Observer& o);
Json theta_classes_json(std::span<const ThetaClass> classes);
Json ledger_json(const WorldLedger& ledger);

/// cell_center,value_real,value_imag
std::string field_csv(const RealField& f);
std::string field_csv(const ComplexField& f);
/// record,theta_path,probability,probability_exact
std::string world_lines_csv(std::span<const WorldLine> lines);

struct Schedule {
  std::optional<Ensemble> observers;
  std::vector<Round> rounds;
};

/// Either a list of rounds or {"observers": [...], "rounds": [...]}.
/// A round is {"theta": "all" | observer id | canonical form, "targets": [ids]}.
/// An observer is {"objective_code", "leaves", "events"}.
/// Throws Error(ParseError).
Schedule parse_schedule(const Json& j);

}  // namespace dht::io
