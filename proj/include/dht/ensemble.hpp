#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dht/causal.hpp"
#include "dht/dendrogram.hpp"
#include "dht/edge_code.hpp"
#include "dht/emergence.hpp"
#include "dht/kernels.hpp"
#include "dht/rational.hpp"

namespace dht {

struct LogEntry {
  std::size_t target = 0;
  DyadicRational recorded;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// One observer: the events it has collected (leaf id i holds event_values[i]),
/// its dendrogram over them and its fixed objective code.
class Observer {
 public:
  /// Throws Error(InvalidDendrogram) unless the dendrogram has leaf ids
  /// 0..events-1, or Error(DuplicateEvent).
  Observer(std::size_t id, std::vector<DyadicRational> event_values, Dendrogram dendrogram,
           EdgeCode objective_code, std::vector<LogEntry> log = {});

  std::size_t id() const noexcept { return id_; }
  const std::vector<DyadicRational>& event_values() const noexcept { return events_; }
  const Dendrogram& dendrogram() const noexcept { return dendrogram_; }
  const EdgeCode& objective_code() const noexcept { return objective_; }
  const std::vector<LogEntry>& measurement_log() const noexcept { return log_; }

  Observer with_log_entry(LogEntry entry) const;

  friend bool operator==(const Observer&, const Observer&) = default;

 private:
  std::size_t id_;
  std::vector<DyadicRational> events_;
  Dendrogram dendrogram_;
  EdgeCode objective_;
  std::vector<LogEntry> log_;
};

/// observers[k].id() == k.
using Ensemble = std::vector<Observer>;

/// n observers with two-branch dendrograms over two distinct seeded values
/// (the smaller on branch 0) and distinct objective codes of depth
/// ceil(log2 n) + 1. Raw mt19937_64 output only, so the result does not depend
/// on the standard library's distribution implementations.
/// Throws Error(TooFewObservers) for n < 2.
Ensemble init_ensemble(std::size_t n, std::uint64_t seed);

/// Throws InvariantViolation on id/index mismatch or when two
/// observers share (objective code, measurement log).
void check_ensemble(const Ensemble& ensemble);

DyadicRational objective_value(const Observer& o);

struct Incorporation {
  Observer observer;
  DyadicRational recorded;  // Monna value of the branch holding the value
  bool changed = false;
};

/// Chooses the leaf whose event is attached to and the branch digit of the new leaf.
using AttachPolicy =
    std::function<std::pair<int, std::uint8_t>(const Observer&, const DyadicRational&)>;

/// Nearest existing event value (ties: the lower value); the new branch takes
/// digit 0 when the value is below that event, else 1.
std::pair<int, std::uint8_t> nearest_event_attach(const Observer& o, const DyadicRational& value);

/// A value already collected leaves the observer unchanged. Otherwise it
/// becomes a new leaf next to the leaf chosen by `policy`.
/// Throws Error(ValueOutOfRange) for a value outside [0,1].
Incorporation incorporate(const Observer& o, const DyadicRational& value,
                          const AttachPolicy& policy = nearest_event_attach);

struct ThetaClass {
  CanonicalForm form;
  std::vector<std::size_t> members;  // ascending ids
  ThetaDescriptor descriptor;
};

/// Observers grouped by canonical form, sorted by form.
std::vector<ThetaClass> theta_classes(const Ensemble& ensemble);

/// Distinct values, ascending, with exact empirical masses.
struct OutcomeDistribution {
  std::vector<DyadicRational> support;
  std::vector<Rational> mass;
};

/// Values recorded when every member of `theta` incorporates the target's
/// objective value. Throws Error(EmptyThetaClass).
OutcomeDistribution objective_distribution(const Ensemble& ensemble, const Observer& target,
                                           const ThetaClass& theta);

/// Phase field of the theta class: the emergence phase of the representative
/// member (lowest id unless given), on the [-1,1] grid of depth grid_depth+1,
/// restricted to its non-negative half. That half has the cells of the [0,1]
/// grid of depth grid_depth.
RealField theta_phase(const Ensemble& ensemble, const ThetaClass& theta, std::uint32_t grid_depth,
                      std::optional<std::size_t> representative = std::nullopt);

/// sqrt(rho) e^{iS} with rho the density of `dist` on s_theta's grid.
ComplexField objective_wavefunction(const OutcomeDistribution& dist, const RealField& s_theta);

// ---------------------------------------------------------------------------
// World ledger

struct Outcome {
  std::vector<std::size_t> targets;  // ascending
  std::size_t eigen_index = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

/// Amplitude sqrt(probability) with zero phase; the probability is exact.
struct Branch {
  Rational probability;
  /// One entry per round; empty where the branch was not at a measured theta.
  std::vector<std::optional<Outcome>> record;
  /// theta_path[0] is the initial class, then one entry per round.
  std::vector<CanonicalForm> theta_path;

  const CanonicalForm& theta() const { return theta_path.back(); }
  double amplitude() const;
};

struct WorldLedger {
  std::vector<Branch> branches;
  std::size_t generation = 0;

  Rational total_probability() const;
};

WorldLedger make_ledger(const CanonicalForm& theta);

struct ClassSplit {
  CanonicalForm form;
  std::vector<std::size_t> members;
  Rational fraction;  // b_j
};

struct MeasureResult {
  Ensemble ensemble;
  WorldLedger ledger;
  OutcomeDistribution eigen;        // a_i^2 = eigen.mass[i]
  std::vector<ClassSplit> classes;  // sorted by form
};

/// Every member of the selected classes incorporates each target's objective
/// value, targets in ascending id order. Branches at a selected class split
/// into (i, j) children with probability p a_i^2 b_j; all other branches get an
/// empty record entry. Throws Error(EmptyThetaClass) or Error(EmptyTargets).
MeasureResult measure(const Ensemble& ensemble, std::span<const ThetaClass> selected,
                      std::span<const std::size_t> targets, const WorldLedger& ledger,
                      kernels::Exec exec = kernels::Exec::Parallel,
                      const AttachPolicy& policy = nearest_event_attach);

struct SelectAll {
  friend bool operator==(const SelectAll&, const SelectAll&) = default;
};
struct SelectObserverClass {
  std::size_t observer = 0;
  friend bool operator==(const SelectObserverClass&, const SelectObserverClass&) = default;
};
using ThetaSelector = std::variant<SelectAll, SelectObserverClass, CanonicalForm>;

struct Round {
  ThetaSelector selector;
  std::vector<std::size_t> targets;
};

/// Throws Error(EmptyThetaClass) when a form selector matches no class and
/// Error(InvalidArgument) for an unknown observer id.
std::vector<ThetaClass> resolve_selector(const Ensemble& ensemble, const ThetaSelector& selector);

struct ChainResult {
  Ensemble ensemble;
  WorldLedger ledger;
  std::vector<MeasureResult> rounds;  // per-round splits; their ensembles/ledgers are cleared
};

/// Throws Error(InvalidArgument) when the branch count would exceed max_branches.
ChainResult chained_measure(const Ensemble& ensemble, std::span<const Round> schedule,
                            const WorldLedger& ledger,
                            kernels::Exec exec = kernels::Exec::Parallel,
                            std::size_t max_branches = std::size_t{1} << 20);

struct ThetaIs {
  CanonicalForm form;
};
struct OutcomeAt {
  std::size_t round = 0;
  std::size_t eigen_index = 0;
};
using Condition = std::variant<ThetaIs, OutcomeAt>;

bool matches(const Branch& b, const Condition& c);

struct RelativeState {
  std::vector<Branch> branches;  // probabilities renormalized
  Rational weight;               // Z^2, the conditioned probability
};

/// Throws Error(EmptyProjection) when no branch matches.
RelativeState relative_state(const WorldLedger& ledger, const Condition& condition);

struct WorldLine {
  std::vector<std::optional<Outcome>> record;
  std::vector<CanonicalForm> theta_path;
  Rational probability;
};

/// Sorted by record, then theta path.
std::vector<WorldLine> world_lines(const WorldLedger& ledger);

}  // namespace dht
