#include "dht/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "dht/error.hpp"

namespace dht {

Observer::Observer(std::size_t id, std::vector<DyadicRational> event_values, Dendrogram dendrogram,
                   EdgeCode objective_code, std::vector<LogEntry> log)
    : id_(id),
      events_(std::move(event_values)),
      dendrogram_(std::move(dendrogram)),
      objective_(std::move(objective_code)),
      log_(std::move(log)) {
  const auto ids = dendrogram_.leaf_ids();
  if (ids.size() != events_.size() || ids.back() != static_cast<int>(events_.size()) - 1) {
    throw Error(ErrorKind::InvalidDendrogram,
                "observer " + std::to_string(id_) + ": leaf ids must be 0.." +
                    std::to_string(events_.size() - 1));
  }
  std::vector<DyadicRational> sorted = events_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::DuplicateEvent, "observer " + std::to_string(id_) + " repeats an event");
  }
}

Observer Observer::with_log_entry(LogEntry entry) const {
  Observer copy = *this;
  copy.log_.push_back(std::move(entry));
  return copy;
}

namespace {

std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

EdgeCode code_from_bits(std::uint64_t bits, std::size_t depth) {
  std::vector<std::uint8_t> digits(depth);
  for (std::size_t j = 0; j < depth; ++j) digits[j] = static_cast<std::uint8_t>((bits >> j) & 1U);
  return EdgeCode(std::move(digits));
}

}  // namespace

Ensemble init_ensemble(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::TooFewObservers, "an ensemble needs >= 2 observers");
  const std::size_t code_depth = ceil_log2(n) + 1;
  if (code_depth > 63) throw Error(ErrorKind::InvalidArgument, "too many observers");
  constexpr std::uint32_t kValueBits = 16;

  std::mt19937_64 rng(seed);
  std::set<std::uint64_t> used_codes;
  const auto code_dendrogram = Dendrogram::from_shape("(x,x)");
  Ensemble out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t a = rng() >> (64 - kValueBits);
    std::uint64_t b = rng() >> (64 - kValueBits);
    while (b == a) b = rng() >> (64 - kValueBits);
    if (b < a) std::swap(a, b);

    std::uint64_t code = rng() >> (64 - code_depth);
    while (!used_codes.insert(code).second) code = rng() >> (64 - code_depth);

    out.emplace_back(k,
                     std::vector<DyadicRational>{DyadicRational(BigInt(static_cast<unsigned long>(a)), kValueBits),
                                                 DyadicRational(BigInt(static_cast<unsigned long>(b)), kValueBits)},
                     code_dendrogram, code_from_bits(code, code_depth));
  }
  return out;
}

void check_ensemble(const Ensemble& ensemble) {
  std::set<std::pair<EdgeCode, std::vector<std::pair<std::size_t, DyadicRational>>>> histories;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const auto& o = ensemble[k];
    DHT_ENSURE(o.id() == k, "observer ids must match their position");
    std::vector<std::pair<std::size_t, DyadicRational>> log;
    for (const auto& e : o.measurement_log()) log.emplace_back(e.target, e.recorded);
    DHT_ENSURE(histories.emplace(o.objective_code(), std::move(log)).second,
               "two observers share one world line");
  }
}

DyadicRational objective_value(const Observer& o) { return monna_map(o.objective_code()); }

std::pair<int, std::uint8_t> nearest_event_attach(const Observer& o, const DyadicRational& value) {
  const auto& events = o.event_values();
  std::size_t best = 0;
  DyadicRational best_gap = (value - events[0]).abs();
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto gap = (value - events[i]).abs();
    if (gap < best_gap || (gap == best_gap && events[i] < events[best])) {
      best = i;
      best_gap = gap;
    }
  }
  return {static_cast<int>(best), value < events[best] ? std::uint8_t{0} : std::uint8_t{1}};
}

Incorporation incorporate(const Observer& o, const DyadicRational& value, const AttachPolicy& policy) {
  if (value.sign() < 0 || value > DyadicRational(1)) {
    throw Error(ErrorKind::ValueOutOfRange, value.to_string() + " is outside [0,1]");
  }
  const auto& events = o.event_values();
  const auto found = std::find(events.begin(), events.end(), value);
  if (found != events.end()) {
    const int leaf = static_cast<int>(found - events.begin());
    return {o, monna_map(o.dendrogram().leaf_code(leaf)), false};
  }
  const auto [leaf, digit] = policy(o, value);
  Dendrogram grown = insert_leaf(o.dendrogram(), o.dendrogram().leaf_node(leaf), digit);
  const int new_id = grown.max_leaf_id();
  DHT_ENSURE(new_id == static_cast<int>(events.size()), "new leaf id must follow the event count");
  auto recorded = monna_map(grown.leaf_code(new_id));
  std::vector<DyadicRational> grown_events = events;
  grown_events.push_back(value);
  return {Observer(o.id(), std::move(grown_events), std::move(grown), o.objective_code(),
                   o.measurement_log()),
          std::move(recorded), true};
}

std::vector<ThetaClass> theta_classes(const Ensemble& ensemble) {
  std::map<CanonicalForm, std::vector<std::size_t>> groups;
  for (const auto& o : ensemble) groups[canonicalize(o.dendrogram())].push_back(o.id());
  std::vector<ThetaClass> out;
  for (auto& [form, members] : groups) {
    auto descriptor = theta_descriptor(ensemble[members.front()].dendrogram());
    out.push_back({form, std::move(members), descriptor});
  }
  return out;
}

namespace {

OutcomeDistribution distribution_of(std::span<const DyadicRational> values) {
  std::map<DyadicRational, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  OutcomeDistribution out;
  const Rational total(static_cast<unsigned long>(values.size()));
  for (const auto& [v, n] : counts) {
    out.support.push_back(v);
    out.mass.push_back(Rational(static_cast<unsigned long>(n)) / total);
  }
  return out;
}

}  // namespace

OutcomeDistribution objective_distribution(const Ensemble& ensemble, const Observer& target,
                                           const ThetaClass& theta) {
  if (theta.members.empty()) throw Error(ErrorKind::EmptyThetaClass, "theta class has no members");
  const auto value = objective_value(target);
  std::vector<DyadicRational> recorded;
  for (auto m : theta.members) recorded.push_back(incorporate(ensemble.at(m), value).recorded);
  return distribution_of(recorded);
}

RealField theta_phase(const Ensemble& ensemble, const ThetaClass& theta, std::uint32_t grid_depth,
                      std::optional<std::size_t> representative) {
  if (theta.members.empty()) throw Error(ErrorKind::EmptyThetaClass, "theta class has no members");
  const auto rep = representative.value_or(theta.members.front());
  if (!std::binary_search(theta.members.begin(), theta.members.end(), rep)) {
    throw Error(ErrorKind::InvalidArgument, "representative is not a member of the theta class");
  }
  const auto& events = ensemble.at(rep).event_values();
  const Grid full = make_grid(Domain::Symmetric, grid_depth + 1);
  const auto diffs = pairwise_differences(events);
  const auto rho = density_field(diff_pdf(diffs), full);
  const auto s = phase_field(rho, EmergenceConfig{});
  const Grid half = make_grid(Domain::Unit, grid_depth);
  return RealField(half, std::vector<double>(s.values.begin() + static_cast<std::ptrdiff_t>(half.size()),
                                             s.values.end()));
}

ComplexField objective_wavefunction(const OutcomeDistribution& dist, const RealField& s_theta) {
  return wavefunction(density_field(dist.support, dist.mass, s_theta.grid), s_theta);
}

// ---------------------------------------------------------------------------

double Branch::amplitude() const { return std::sqrt(probability.get_d()); }

Rational WorldLedger::total_probability() const {
  Rational sum = 0;
  for (const auto& b : branches) sum += b.probability;
  return sum;
}

WorldLedger make_ledger(const CanonicalForm& theta) {
  WorldLedger ledger;
  ledger.branches.push_back({Rational(1), {}, {theta}});
  return ledger;
}

MeasureResult measure(const Ensemble& ensemble, std::span<const ThetaClass> selected,
                      std::span<const std::size_t> targets, const WorldLedger& ledger,
                      kernels::Exec exec, const AttachPolicy& policy) {
  if (selected.empty()) throw Error(ErrorKind::EmptyThetaClass, "no theta class selected");
  if (targets.empty()) throw Error(ErrorKind::EmptyTargets, "no measurement targets");
  std::set<std::size_t> member_set;
  std::set<CanonicalForm> forms;
  for (const auto& c : selected) {
    if (c.members.empty()) throw Error(ErrorKind::EmptyThetaClass, "theta class has no members");
    member_set.insert(c.members.begin(), c.members.end());
    forms.insert(c.form);
  }
  const std::set<std::size_t> target_set(targets.begin(), targets.end());
  std::vector<DyadicRational> values;
  for (auto t : target_set) {
    if (t >= ensemble.size()) {
      throw Error(ErrorKind::InvalidArgument, "unknown target observer " + std::to_string(t));
    }
    values.push_back(objective_value(ensemble[t]));
  }
  const std::vector<std::size_t> members(member_set.begin(), member_set.end());
  const std::vector<std::size_t> target_ids(target_set.begin(), target_set.end());
  for (auto m : members) {
    if (m >= ensemble.size()) throw Error(ErrorKind::InvalidArgument, "unknown member observer");
  }

  MeasureResult out;
  out.ensemble = ensemble;
  std::vector<std::vector<DyadicRational>> recorded(members.size());
  const auto count = static_cast<std::ptrdiff_t>(members.size());
  auto run_member = [&](std::ptrdiff_t k) {
    const auto idx = static_cast<std::size_t>(k);
    Observer o = ensemble[members[idx]];
    for (std::size_t t = 0; t < values.size(); ++t) {
      auto inc = incorporate(o, values[t], policy);
      recorded[idx].push_back(inc.recorded);
      o = inc.observer.with_log_entry({target_ids[t], std::move(inc.recorded)});
    }
    out.ensemble[members[idx]] = std::move(o);
  };
  if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) run_member(k);
  } else {
    for (std::ptrdiff_t k = 0; k < count; ++k) run_member(k);
  }

  std::vector<DyadicRational> pooled;
  for (const auto& r : recorded) pooled.insert(pooled.end(), r.begin(), r.end());
  out.eigen = distribution_of(pooled);

  std::map<CanonicalForm, std::vector<std::size_t>> regrouped;
  for (auto m : members) regrouped[canonicalize(out.ensemble[m].dendrogram())].push_back(m);
  const Rational total(static_cast<unsigned long>(members.size()));
  for (auto& [form, ids] : regrouped) {
    const Rational b(static_cast<unsigned long>(ids.size()));
    out.classes.push_back({form, std::move(ids), b / total});
  }

  out.ledger.generation = ledger.generation + 1;
  for (const auto& branch : ledger.branches) {
    if (!forms.contains(branch.theta())) {
      Branch same = branch;
      same.record.emplace_back(std::nullopt);
      same.theta_path.push_back(branch.theta());
      out.ledger.branches.push_back(std::move(same));
      continue;
    }
    for (std::size_t i = 0; i < out.eigen.support.size(); ++i) {
      for (const auto& cls : out.classes) {
        Branch child = branch;
        child.probability = branch.probability * out.eigen.mass[i] * cls.fraction;
        child.record.emplace_back(Outcome{target_ids, i});
        child.theta_path.push_back(cls.form);
        out.ledger.branches.push_back(std::move(child));
      }
    }
  }
  DHT_ENSURE(out.ledger.total_probability() == ledger.total_probability(),
             "measurement changed the ledger norm");
  return out;
}

std::vector<ThetaClass> resolve_selector(const Ensemble& ensemble, const ThetaSelector& selector) {
  auto classes = theta_classes(ensemble);
  if (std::holds_alternative<SelectAll>(selector)) return classes;
  if (const auto* s = std::get_if<SelectObserverClass>(&selector)) {
    if (s->observer >= ensemble.size()) {
      throw Error(ErrorKind::InvalidArgument, "unknown observer " + std::to_string(s->observer));
    }
    for (auto& c : classes) {
      if (std::binary_search(c.members.begin(), c.members.end(), s->observer)) return {std::move(c)};
    }
  }
  const auto& form = std::get<CanonicalForm>(selector);
  for (auto& c : classes) {
    if (c.form == form) return {std::move(c)};
  }
  throw Error(ErrorKind::EmptyThetaClass, "no observer has shape " + form.str());
}

ChainResult chained_measure(const Ensemble& ensemble, std::span<const Round> schedule,
                            const WorldLedger& ledger, kernels::Exec exec, std::size_t max_branches) {
  ChainResult out{ensemble, ledger, {}};
  for (const auto& round : schedule) {
    const auto classes = resolve_selector(out.ensemble, round.selector);
    auto r = measure(out.ensemble, classes, round.targets, out.ledger, exec);
    if (r.ledger.branches.size() > max_branches) {
      throw Error(ErrorKind::InvalidArgument,
                  "ledger would hold " + std::to_string(r.ledger.branches.size()) +
                      " branches, above the limit of " + std::to_string(max_branches));
    }
    out.ensemble = std::move(r.ensemble);
    out.ledger = std::move(r.ledger);
    r.ensemble.clear();
    r.ledger = {};
    out.rounds.push_back(std::move(r));
  }
  return out;
}

bool matches(const Branch& b, const Condition& c) {
  if (const auto* t = std::get_if<ThetaIs>(&c)) return b.theta() == t->form;
  const auto& o = std::get<OutcomeAt>(c);
  return o.round < b.record.size() && b.record[o.round] && b.record[o.round]->eigen_index == o.eigen_index;
}

RelativeState relative_state(const WorldLedger& ledger, const Condition& condition) {
  RelativeState out;
  out.weight = 0;
  for (const auto& b : ledger.branches) {
    if (!matches(b, condition)) continue;
    out.weight += b.probability;
    out.branches.push_back(b);
  }
  if (out.branches.empty() || out.weight == 0) {
    throw Error(ErrorKind::EmptyProjection, "no branch satisfies the condition");
  }
  for (auto& b : out.branches) b.probability /= out.weight;
  return out;
}

std::vector<WorldLine> world_lines(const WorldLedger& ledger) {
  std::vector<WorldLine> out;
  out.reserve(ledger.branches.size());
  for (const auto& b : ledger.branches) out.push_back({b.record, b.theta_path, b.probability});
  std::sort(out.begin(), out.end(), [](const WorldLine& a, const WorldLine& b) {
    if (a.record != b.record) return a.record < b.record;
    return a.theta_path < b.theta_path;
  });
  return out;
}

}  // namespace dht
