#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dht/ensemble.hpp"
#include "dht/error.hpp"

using namespace dht;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

DyadicRational dy(const char* s) { return DyadicRational::parse(s); }

Observer make_observer(std::size_t id, const char* objective, std::initializer_list<const char*> leaves,
                       std::initializer_list<const char*> events) {
  std::vector<EdgeCode> codes;
  for (const char* c : leaves) codes.push_back(EdgeCode::parse(c));
  std::vector<DyadicRational> values;
  for (const char* e : events) values.push_back(dy(e));
  return Observer(id, values, Dendrogram::from_leaf_codes(codes), EdgeCode::parse(objective));
}

const char* kCaterpillar = "(((x,x),x),x)";

// Three observers of type A and one of type B share the caterpillar shape.
// Observer 4 (objective 1011, value 11/16) is the target. Both types attach
// 11/16 next to their event 12/16 on the 0 side, so every member records 1/2;
// type A ends up as (((x,x),x),(x,x)) and type B as (((x,x),(x,x)),x).
Ensemble split_ensemble(const char* b_second_event = "12/16") {
  Ensemble e;
  for (const char* code : {"00", "01", "10"}) {
    e.push_back(make_observer(e.size(), code, {"000", "001", "01", "1"}, {"1/16", "2/16", "4/16", "12/16"}));
  }
  e.push_back(make_observer(3, "11", {"0", "10", "110", "111"}, {"1/16", b_second_event, "14/16", "15/16"}));
  e.push_back(make_observer(4, "1011", {"0", "1"}, {"1/8", "7/8"}));
  return e;
}

ThetaClass class_of(const Ensemble& e, const char* form) {
  for (const auto& c : theta_classes(e)) {
    if (c.form.str() == form) return c;
  }
  FAIL("no such class");
  return {};
}

double amplitude_norm(const WorldLedger& l) {
  double s = 0.0;
  for (const auto& b : l.branches) s += b.amplitude() * b.amplitude();
  return s;
}

}  // namespace

TEST_CASE("initial ensemble") {
  for (std::size_t n : {2u, 3u, 10u, 100u}) {
    const auto e = init_ensemble(n, 42);
    REQUIRE(e.size() == n);
    const auto classes = theta_classes(e);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].form.str() == "(x,x)");
    CHECK(classes[0].members.size() == n);
    const auto depth = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    std::set<EdgeCode> codes;
    for (const auto& o : e) {
      CHECK(o.objective_code().depth() == depth);
      codes.insert(o.objective_code());
      const auto& d = o.dendrogram();
      const int zero_leaf = d.leaf_code(0).digit(0) == 0 ? 0 : 1;
      CHECK(o.event_values()[static_cast<std::size_t>(zero_leaf)] < o.event_values()[static_cast<std::size_t>(1 - zero_leaf)]);
    }
    CHECK(codes.size() == n);
    CHECK_NOTHROW(check_ensemble(e));
  }
  CHECK(init_ensemble(17, 5) == init_ensemble(17, 5));
  CHECK_FALSE(init_ensemble(17, 5) == init_ensemble(17, 6));
  CHECK(kind_of([] { init_ensemble(1, 0); }) == ErrorKind::TooFewObservers);
}

TEST_CASE("observer construction and objective values") {
  const auto o = make_observer(0, "1", {"0", "1"}, {"1/4", "3/4"});
  CHECK(objective_value(o) == dy("1/2"));
  CHECK(objective_value(o) == objective_value(o));
  CHECK(objective_value(make_observer(0, "1011", {"0", "1"}, {"1/4", "3/4"})) == dy("11/16"));
  CHECK(kind_of([] { make_observer(0, "1", {"0", "1"}, {"1/4", "1/4"}); }) == ErrorKind::DuplicateEvent);
  CHECK(kind_of([] { make_observer(0, "1", {"0", "1"}, {"1/4"}); }) == ErrorKind::InvalidDendrogram);

  Ensemble twins{make_observer(0, "1", {"0", "1"}, {"1/4", "3/4"}), make_observer(1, "1", {"0", "1"}, {"1/8", "3/4"})};
  CHECK_THROWS_AS(check_ensemble(twins), InvariantViolation);
  Ensemble misnumbered{make_observer(1, "0", {"0", "1"}, {"1/4", "3/4"}), make_observer(0, "1", {"0", "1"}, {"1/8", "3/4"})};
  CHECK_THROWS_AS(check_ensemble(misnumbered), InvariantViolation);
}

TEST_CASE("incorporate") {
  const auto o = make_observer(0, "1", {"0", "1"}, {"1/4", "3/4"});
  // 5/8 is nearest to 3/4 (leaf code 1) and below it: new leaf 10.
  const auto first = incorporate(o, dy("5/8"));
  CHECK(first.changed);
  CHECK(first.recorded == dy("1/2"));
  CHECK(first.observer.dendrogram().leaf_count() == 3);
  CHECK(canonicalize(first.observer.dendrogram()).str() == "((x,x),x)");
  CHECK(first.observer.dendrogram().leaf_code(2).to_string() == "10");

  const auto again = incorporate(first.observer, dy("5/8"));
  CHECK_FALSE(again.changed);
  CHECK(again.observer == first.observer);
  CHECK(again.recorded == first.recorded);

  // Equidistant from 1/4 and 3/4: the lower value wins, and 1/2 lies above it.
  CHECK(incorporate(o, dy("1/2")).recorded == dy("1/4"));

  // Another observer whose nearest event sits deeper records a different code.
  const auto other = make_observer(1, "0", {"00", "01", "1"}, {"1/8", "1/2", "7/8"});
  const auto r = incorporate(other, dy("5/8"));
  CHECK(r.observer.dendrogram().leaf_code(3).to_string() == "011");
  CHECK(r.recorded == dy("3/8"));
  CHECK(r.recorded != first.recorded);

  CHECK(kind_of([&] { incorporate(o, dy("3/2")); }) == ErrorKind::ValueOutOfRange);
  CHECK(kind_of([&] { incorporate(o, dy("-1/8")); }) == ErrorKind::ValueOutOfRange);

  // Repeat incorporation is an exact identity on random dendrograms.
  std::mt19937_64 rng(13);
  auto ensemble = init_ensemble(30, 3);
  for (auto& obs : ensemble) {
    for (int k = 0; k < 6; ++k) {
      const DyadicRational v(BigInt(static_cast<unsigned long>(rng() >> 54)), 10);
      obs = incorporate(obs, v).observer;
      const auto repeat = incorporate(obs, v);
      CHECK_FALSE(repeat.changed);
      CHECK(repeat.observer == obs);
    }
  }
}

TEST_CASE("objective distribution and wavefunction") {
  const auto e = split_ensemble();
  const auto theta = class_of(e, kCaterpillar);
  CHECK(theta.members == std::vector<std::size_t>{0, 1, 2, 3});
  const auto point = objective_distribution(e, e[4], theta);
  CHECK(point.support == std::vector<DyadicRational>{dy("1/2")});
  CHECK(point.mass == std::vector<Rational>{Rational(1)});

  // Type B with event 10/16 attaches above it instead: new leaf 101, value 5/8.
  const auto e2 = split_ensemble("10/16");
  const auto mixed = objective_distribution(e2, e2[4], class_of(e2, kCaterpillar));
  CHECK(mixed.support == std::vector<DyadicRational>{dy("1/2"), dy("5/8")});
  CHECK(mixed.mass == std::vector<Rational>{Rational(3, 4), Rational(1, 4)});

  CHECK(kind_of([&] { objective_distribution(e, e[4], ThetaClass{}); }) == ErrorKind::EmptyThetaClass);

  const auto s = theta_phase(e, theta, 5);
  CHECK(s.grid == make_grid(Domain::Unit, 5));
  const auto psi = objective_wavefunction(point, s);
  const auto rho = density_field(point.support, point.mass, s.grid);
  std::size_t support_cells = 0;
  for (std::size_t c = 0; c < psi.size(); ++c) {
    CHECK(std::norm(psi.values[c]) == doctest::Approx(rho.values[c]).epsilon(1e-14));
    if (rho.values[c] > 0) ++support_cells;
  }
  CHECK(support_cells == 1);

  const auto flat = objective_wavefunction(mixed, RealField(make_grid(Domain::Unit, 4), 0.0));
  for (const auto& v : flat.values) CHECK(v.imag() == 0.0);
  CHECK(kind_of([&] { theta_phase(e, theta, 5, 4); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("measure: the constructed 3/4 - 1/4 split") {
  const auto e = split_ensemble();
  const std::vector<ThetaClass> selected{class_of(e, kCaterpillar)};
  const std::vector<std::size_t> targets{4};
  const auto ledger = make_ledger(CanonicalForm(kCaterpillar));
  const auto m = measure(e, selected, targets, ledger);

  CHECK(m.eigen.support == std::vector<DyadicRational>{dy("1/2")});
  REQUIRE(m.classes.size() == 2);
  CHECK(m.classes[0].form.str() == "(((x,x),(x,x)),x)");
  CHECK(m.classes[0].members == std::vector<std::size_t>{3});
  CHECK(m.classes[0].fraction == Rational(1, 4));
  CHECK(m.classes[1].form.str() == "(((x,x),x),(x,x))");
  CHECK(m.classes[1].fraction == Rational(3, 4));
  for (const auto& c : m.classes) {
    for (auto id : c.members) CHECK(canonicalize(m.ensemble[id].dendrogram()) == c.form);
  }

  REQUIRE(m.ledger.branches.size() == 2);
  CHECK(m.ledger.generation == 1);
  CHECK(m.ledger.total_probability() == 1);
  const auto lines = world_lines(m.ledger);
  std::multiset<Rational> probs;
  for (const auto& w : lines) probs.insert(w.probability);
  CHECK(probs == std::multiset<Rational>{Rational(1, 4), Rational(3, 4)});
  CHECK(m.ensemble[4] == e[4]);
  CHECK(m.ensemble[0].measurement_log() == std::vector<LogEntry>{{4, dy("1/2")}});
  CHECK_NOTHROW(check_ensemble(m.ensemble));

  // A branch at another theta only gets an empty record entry.
  const auto other = measure(e, selected, targets, make_ledger(CanonicalForm("(x,x)")));
  REQUIRE(other.ledger.branches.size() == 1);
  CHECK_FALSE(other.ledger.branches[0].record[0].has_value());
  CHECK(other.ledger.branches[0].probability == 1);

  // Members of one type alone record one value and move together: no split.
  const Ensemble same{make_observer(0, "00", {"000", "001", "01", "1"}, {"1/16", "2/16", "4/16", "12/16"}),
                      make_observer(1, "01", {"000", "001", "01", "1"}, {"1/16", "2/16", "4/16", "12/16"}),
                      make_observer(2, "1011", {"0", "1"}, {"1/8", "7/8"})};
  const auto sm = measure(same, std::vector<ThetaClass>{class_of(same, kCaterpillar)}, std::vector<std::size_t>{2},
                          ledger);
  CHECK(sm.ledger.branches.size() == 1);
  CHECK(sm.ledger.branches[0].probability == 1);

  CHECK(kind_of([&] { measure(e, std::vector<ThetaClass>{}, targets, ledger); }) == ErrorKind::EmptyThetaClass);
  CHECK(kind_of([&] { measure(e, selected, std::vector<std::size_t>{}, ledger); }) == ErrorKind::EmptyTargets);
  CHECK(kind_of([&] { measure(e, selected, std::vector<std::size_t>{9}, ledger); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("selectors") {
  const auto e = split_ensemble();
  CHECK(resolve_selector(e, SelectAll{}).size() == 2);
  const auto by_id = resolve_selector(e, SelectObserverClass{4});
  REQUIRE(by_id.size() == 1);
  CHECK(by_id[0].form.str() == "(x,x)");
  CHECK(resolve_selector(e, CanonicalForm(kCaterpillar))[0].members.size() == 4);
  CHECK(kind_of([&] { resolve_selector(e, CanonicalForm("((x,x),(x,x))")); }) == ErrorKind::EmptyThetaClass);
  CHECK(kind_of([&] { resolve_selector(e, SelectObserverClass{7}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("chained measurement") {
  const auto e = init_ensemble(12, 8);
  const auto start = make_ledger(theta_classes(e)[0].form);
  const auto none = chained_measure(e, std::vector<Round>{}, start);
  CHECK(none.ensemble == e);
  CHECK(none.ledger.branches.size() == 1);
  CHECK(none.ledger.generation == 0);

  const std::vector<Round> twice{{SelectAll{}, {3}}, {SelectAll{}, {3}}};
  const auto r = chained_measure(e, twice, start);
  CHECK(r.ledger.generation == 2);
  CHECK(r.ledger.total_probability() == 1);
  // The repeated round changes no dendrogram.
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto once = chained_measure(e, std::span(twice).first(1), start);
    CHECK(once.ensemble[k].dendrogram() == r.ensemble[k].dendrogram());
  }

  // Two rounds expand as the product of per-round splits.
  const std::vector<Round> two{{SelectAll{}, {1}}, {SelectAll{}, {2, 5}}};
  const auto c = chained_measure(e, two, start);
  std::size_t bound = 1;
  for (const auto& round : c.rounds) bound *= round.eigen.support.size() * round.classes.size();
  CHECK(c.ledger.branches.size() <= bound);
  CHECK(c.ledger.total_probability() == 1);
  for (const auto& b : c.ledger.branches) {
    CHECK(b.record.size() == 2);
    CHECK(b.theta_path.size() == 3);
    // p = a_i^2 b_j for round 1 times a_i'^2 b_j' for round 2.
    Rational expected = 1;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& round = c.rounds[k];
      if (!b.record[k]) continue;
      expected *= round.eigen.mass[b.record[k]->eigen_index];
      for (const auto& cls : round.classes) {
        if (cls.form == b.theta_path[k + 1]) expected *= cls.fraction;
      }
    }
    CHECK(b.probability == expected);
  }

  CHECK(kind_of([&] { chained_measure(e, two, start, kernels::Exec::Serial, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("ledger normalization over random schedules") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 15;
    auto ensemble = init_ensemble(n, rng());
    auto ledger = make_ledger(theta_classes(ensemble)[0].form);
    const std::size_t rounds = 1 + rng() % 4;
    for (std::size_t r = 0; r < rounds; ++r) {
      std::vector<std::size_t> targets;
      for (std::size_t k = 0; k < 1 + rng() % 3; ++k) targets.push_back(rng() % n);
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      ThetaSelector sel = SelectAll{};
      if (rng() % 2) sel = SelectObserverClass{rng() % n};
      const auto classes = resolve_selector(ensemble, sel);
      auto m = measure(ensemble, classes, targets, ledger);
      Rational fractions = 0;
      for (const auto& c : m.classes) fractions += c.fraction;
      CHECK(fractions == 1);
      ensemble = std::move(m.ensemble);
      ledger = std::move(m.ledger);
      CHECK(ledger.total_probability() == 1);
      CHECK(std::abs(amplitude_norm(ledger) - 1.0) <= 1e-12);
      CHECK(ledger.generation == r + 1);
      for (const auto& b : ledger.branches) CHECK(b.record.size() == ledger.generation);
      CHECK_NOTHROW(check_ensemble(ensemble));
    }
  }
}

TEST_CASE("relative state: Bell-type pair") {
  // (phi_1 eta_1 + phi_2 eta_2) / sqrt 2: eta is the theta, phi the outcome.
  const CanonicalForm root("(x,x)"), eta1("((x,x),x)"), eta2("(((x,x),x),x)");
  WorldLedger l;
  l.generation = 1;
  l.branches.push_back({Rational(1, 2), {Outcome{{0}, 0}}, {root, eta1}});
  l.branches.push_back({Rational(1, 2), {Outcome{{0}, 1}}, {root, eta2}});
  const auto rs = relative_state(l, ThetaIs{eta1});
  REQUIRE(rs.branches.size() == 1);
  CHECK(rs.branches[0].probability == 1);
  CHECK(rs.branches[0].amplitude() == 1.0);
  CHECK(rs.branches[0].record[0]->eigen_index == 0);
  CHECK(rs.weight == Rational(1, 2));

  const auto by_outcome = relative_state(l, OutcomeAt{0, 1});
  REQUIRE(by_outcome.branches.size() == 1);
  CHECK(by_outcome.branches[0].theta() == eta2);

  CHECK(kind_of([&] { relative_state(l, ThetaIs{root}); }) == ErrorKind::EmptyProjection);
  CHECK(kind_of([&] { relative_state(l, OutcomeAt{3, 0}); }) == ErrorKind::EmptyProjection);
}

TEST_CASE("relative state reproduces brute-force conditional expectations") {
  std::mt19937_64 rng(77);
  const std::vector<CanonicalForm> forms{CanonicalForm("(x,x)"), CanonicalForm("((x,x),x)"),
                                         CanonicalForm("(((x,x),x),x)"), CanonicalForm("((x,x),(x,x))")};
  for (int t = 0; t < 200; ++t) {
    const std::size_t rounds = 1 + rng() % 3;
    const std::size_t count = 1 + rng() % 64;
    WorldLedger l;
    l.generation = rounds;
    unsigned long total = 0;
    std::vector<unsigned long> weights;
    for (std::size_t b = 0; b < count; ++b) weights.push_back(1 + rng() % 50), total += weights.back();
    for (std::size_t b = 0; b < count; ++b) {
      Rational p(weights[b], total);
      p.canonicalize();
      Branch br{p, {}, {forms[0]}};
      for (std::size_t r = 0; r < rounds; ++r) {
        if (rng() % 4 == 0) br.record.push_back(std::nullopt);
        else br.record.push_back(Outcome{{r}, static_cast<std::size_t>(rng() % 3)});
        br.theta_path.push_back(forms[rng() % forms.size()]);
      }
      l.branches.push_back(br);
    }
    // Diagonal observable on the complementary factor.
    auto observable = [](const Branch& b) {
      double a = 0.0;
      for (const auto& o : b.record) a += o ? static_cast<double>(o->eigen_index) + 0.5 : -1.0;
      return a + static_cast<double>(b.theta().str().size());
    };
    std::vector<Condition> conditions;
    for (const auto& f : forms) conditions.emplace_back(ThetaIs{f});
    for (std::size_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < 3; ++i) conditions.emplace_back(OutcomeAt{r, i});
    }
    for (const auto& cond : conditions) {
      double num = 0.0, den = 0.0;
      for (const auto& b : l.branches) {
        if (!matches(b, cond)) continue;
        const double p = b.amplitude() * b.amplitude();
        num += p * observable(b);
        den += p;
      }
      if (den == 0.0) {
        CHECK(kind_of([&] { relative_state(l, cond); }) == ErrorKind::EmptyProjection);
        continue;
      }
      const auto rs = relative_state(l, cond);
      double expectation = 0.0;
      for (const auto& b : rs.branches) expectation += b.amplitude() * b.amplitude() * observable(b);
      CHECK(std::abs(expectation - num / den) <= 1e-12);
      CHECK(std::abs(rs.weight.get_d() - den) <= 1e-12);
      Rational renorm = 0;
      for (const auto& b : rs.branches) renorm += b.probability;
      CHECK(renorm == 1);
    }
  }
}

TEST_CASE("world lines") {
  const auto fresh = world_lines(make_ledger(CanonicalForm("(x,x)")));
  REQUIRE(fresh.size() == 1);
  CHECK(fresh[0].probability == 1);

  const auto e = init_ensemble(20, 4);
  const std::vector<Round> rounds{{SelectAll{}, {0, 7}}, {SelectObserverClass{3}, {11}}};
  const auto r = chained_measure(e, rounds, make_ledger(theta_classes(e)[0].form));
  const auto lines = world_lines(r.ledger);
  Rational sum = 0;
  for (const auto& w : lines) sum += w.probability;
  CHECK(sum == 1);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    CHECK(std::tie(lines[k - 1].record, lines[k - 1].theta_path) < std::tie(lines[k].record, lines[k].theta_path));
  }
  CHECK(chained_measure(e, rounds, make_ledger(theta_classes(e)[0].form), kernels::Exec::Serial).ledger.branches.size() ==
        r.ledger.branches.size());
}
