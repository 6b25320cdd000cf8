#include "cli.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "dht/causal.hpp"
#include "dht/emergence.hpp"
#include "dht/ensemble.hpp"
#include "dht/error.hpp"
#include "dht/ingest.hpp"
#include "dht/json_io.hpp"

namespace dht::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

const std::array<const char*, 6> kCommands = {"cluster", "emerge", "cone", "classify", "simulate",
                                              "compare-linkage"};

// The config file holds one object per subcommand, keyed by long flag name:
//   {"emerge": {"grid-depth": 6, "continuity-form": "both"}}
// Only the section of the command being run is applied.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string active) : active_(std::move(active)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::FileError("config must be a JSON object keyed by subcommand");
    std::vector<CLI::ConfigItem> items;
    if (!j.contains(active_)) return items;
    const auto& section = j.at(active_);
    if (!section.is_object()) throw CLI::FileError("config section \"" + active_ + "\" must be an object");
    for (const auto& [key, value] : section.items()) {
      CLI::ConfigItem item;
      item.parents = {active_};
      item.name = key;
      auto text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(text(v));
      } else {
        item.inputs.push_back(text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  std::string active_;
};

struct Input {
  std::string path;
  std::string bytes;
};

Input read_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return {path, ss.str()};
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw InvariantViolation("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

Json manifest(const std::string& command, Json config, std::span<const Input> inputs) {
  Json in = Json::array();
  for (const auto& i : inputs) in.push_back(Json{{"path", i.path}, {"sha256", sha256_hex(i.bytes)}});
  return Json{{"tool", "dht"},
              {"version", kVersion},
              {"command", command},
              {"config", std::move(config)},
              {"inputs", std::move(in)}};
}

Json parse_json(const Input& in) {
  try {
    return Json::parse(in.bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, in.path + ": " + e.what());
  }
}

io::DendrogramDoc load_dendrogram(const Input& in) {
  const auto j = parse_json(in);
  try {
    if (j.is_object() && j.contains("dendrogram")) return io::parse_dendrogram(j.at("dendrogram"));
    return io::parse_dendrogram(j);
  } catch (const Error& e) {
    throw Error(e.kind(), in.path + ": " + e.detail());
  }
}

Dendrogram require_dendrogram(const io::DendrogramDoc& doc, const std::string& path) {
  if (!doc.dendrogram) throw Error(ErrorKind::ParseError, path + ": no \"leaves\" field");
  return *doc.dendrogram;
}

// Everything is rendered in memory first; files are only touched once the
// whole command has succeeded.
class OutputSet {
 public:
  void add(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  void add(fs::path path, const Json& j) { add(std::move(path), j.dump(2) + "\n"); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      fs::path tmp = path;
      tmp += ".tmp";
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        f << content;
        if (!f.flush()) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
      }
      fs::rename(tmp, path);
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

// ---------------------------------------------------------------------------

struct ClusterOptions {
  std::string input, output, transitions;
  std::string metric = "euclidean", linkage = "average", duplicates = "reject";
  bool header = false;
};

LinkageSpec linkage_spec(const std::string& metric, const std::string& linkage) {
  LinkageSpec spec;
  spec.metric = parse_metric(metric);
  spec.linkage = parse_linkage(linkage);
  return spec;
}

std::vector<EventRecord> load_csv(const Input& in, bool header, const std::string& duplicates) {
  std::istringstream ss(in.bytes);
  LoadOptions opts;
  opts.header = header;
  opts.duplicates = duplicates == "jitter" ? DuplicatePolicy::Jitter : DuplicatePolicy::Reject;
  try {
    return load_events(ss, opts);
  } catch (const Error& e) {
    throw Error(e.kind(), in.path + ": " + e.detail());
  }
}

void run_cluster(const ClusterOptions& o) {
  const auto in = read_input(o.input);
  const auto events = load_csv(in, o.header, o.duplicates);
  const auto spec = linkage_spec(o.metric, o.linkage);
  const auto d = agglomerate(events, spec);

  const Json config{{"metric", o.metric}, {"linkage", o.linkage}, {"tie_break", to_string(spec.tie_break)},
                    {"header", o.header}, {"duplicates", o.duplicates}};
  const std::array inputs{in};
  OutputSet out;
  out.add(o.output, Json{{"manifest", manifest("cluster", config, inputs)},
                         {"event_count", events.size()},
                         {"dendrogram", io::dendrogram_json(d)}});
  if (!o.transitions.empty()) {
    Json checks = Json::array();
    std::size_t disagreements = 0;
    for (const auto& t : recluster_transitions(events, spec)) {
      if (!t.insertion_reachable()) ++disagreements;
      checks.push_back(Json{{"from_events", t.from_events},
                            {"from", t.from.str()},
                            {"to", t.to.str()},
                            {"verdict", io::verdict_json(t.verdict)},
                            {"insertion_reachable", t.insertion_reachable()}});
    }
    out.add(o.transitions, Json{{"manifest", manifest("cluster --transitions", config, inputs)},
                                {"disagreements", disagreements},
                                {"transitions", std::move(checks)}});
  }
  out.commit();
}

// ---------------------------------------------------------------------------

struct EmergeFlags {
  std::uint32_t grid_depth = 0;  // 0: automatic
  double z_v = 1.0;
  std::string potential_mode = "cdf";
  std::string phase_mode = "integrate-momentum";
  std::string convention = "ordered";
};

void add_emerge_flags(CLI::App* sub, EmergeFlags& f) {
  sub->add_option("--grid-depth", f.grid_depth, "Grid depth (2^depth cells on [-1,1]); 0 picks max event exponent + 2")
      ->check(CLI::Range(0, 30));
  sub->add_option("--z-v", f.z_v, "Coefficient of the v potential");
  sub->add_option("--potential-mode", f.potential_mode, "Classical potentials as running integrals or totals")
      ->check(CLI::IsMember({"cdf", "total-mass"}));
  sub->add_option("--phase-mode", f.phase_mode, "Phase field construction")
      ->check(CLI::IsMember({"integrate-momentum", "unit-modulus"}));
  sub->add_option("--convention", f.convention, "Pairwise differences over ordered or unordered pairs")
      ->check(CLI::IsMember({"ordered", "unordered"}));
}

EmergenceConfig emergence_config(const EmergeFlags& f) {
  EmergenceConfig cfg;
  if (f.grid_depth != 0) cfg.grid_depth = f.grid_depth;
  cfg.z_v = f.z_v;
  cfg.potential_mode = f.potential_mode == "cdf" ? PotentialMode::Cdf : PotentialMode::TotalMass;
  cfg.phase_mode = f.phase_mode == "unit-modulus" ? PhaseMode::UnitModulus : PhaseMode::IntegrateMomentum;
  cfg.convention = f.convention == "unordered" ? PairConvention::Unordered : PairConvention::Ordered;
  return cfg;
}

Json emerge_flags_json(const EmergeFlags& f) {
  return Json{{"grid_depth", f.grid_depth == 0 ? Json("auto") : Json(f.grid_depth)},
              {"z_v", f.z_v},
              {"potential_mode", f.potential_mode},
              {"phase_mode", f.phase_mode},
              {"convention", f.convention}};
}

struct EmergeOptions {
  std::string input, out_dir;
  EmergeFlags flags;
  std::string continuity_form = "both";
  bool uniform_rho = false;
};

void run_emerge(const EmergeOptions& o) {
  const auto in = read_input(o.input);
  const auto doc = load_dendrogram(in);
  const auto events = doc.emergence_events();
  const auto r = run_emergence(events, emergence_config(o.flags), o.uniform_rho);

  Json config = emerge_flags_json(o.flags);
  config["continuity_form"] = o.continuity_form;
  config["uniform_rho"] = o.uniform_rho;
  const std::array inputs{in};

  Json support = Json::array(), mass = Json::array();
  for (std::size_t j = 0; j < r.pdf.support.size(); ++j) {
    support.push_back(r.pdf.support[j].to_string());
    mass.push_back(to_string(r.pdf.mass[j]));
  }
  Json ev = Json::array();
  for (const auto& e : events) ev.push_back(e.to_string());

  const bool literal = o.continuity_form != "standard-flux";
  const bool standard = o.continuity_form != "literal-squared";
  Json summary = io::summary_json(r.summary);
  if (!literal) summary.erase("max_abs_continuity_literal");
  if (!standard) summary.erase("max_abs_continuity_standard");

  const fs::path dir = o.out_dir;
  OutputSet out;
  out.add(dir / "summary.json",
          Json{{"manifest", manifest("emerge", config, inputs)},
               {"events", std::move(ev)},
               {"grid",
                {{"domain", "[-1,1]"}, {"depth", r.grid.depth}, {"cells", r.grid.size()}, {"spacing", r.grid.spacing()}}},
               {"difference_pdf", {{"support", std::move(support)}, {"mass", std::move(mass)}}},
               {"summary", std::move(summary)}});
  out.add(dir / "rho.csv", io::field_csv(r.rho));
  out.add(dir / "s.csv", io::field_csv(r.s));
  out.add(dir / "uq.csv", io::field_csv(r.uq));
  out.add(dir / "v.csv", io::field_csv(r.v));
  out.add(dir / "u.csv", io::field_csv(r.u));
  out.add(dir / "psi.csv", io::field_csv(r.psi));
  out.add(dir / "hj.csv", io::field_csv(r.hj));

  std::string csv = "cell_center";
  if (literal) csv += ",literal_squared";
  if (standard) csv += ",standard_flux";
  csv += '\n';
  for (std::size_t c = 0; c < r.grid.size(); ++c) {
    csv += io::format_double(r.grid.center(c));
    if (literal) csv += ',' + io::format_double(r.continuity_literal.values[c]);
    if (standard) csv += ',' + io::format_double(r.continuity_standard.values[c]);
    csv += '\n';
  }
  out.add(dir / "continuity.csv", std::move(csv));
  out.commit();
}

// ---------------------------------------------------------------------------

struct ConeOptions {
  std::string input, output, dot;
  std::size_t steps = 3;
  std::size_t cap = 100000;
};

void run_cone(const ConeOptions& o) {
  const auto in = read_input(o.input);
  const auto d = require_dendrogram(load_dendrogram(in), in.path);
  const auto cone = future_cone(d, o.steps, o.cap);
  const Json config{{"steps", o.steps}, {"cap", o.cap}};
  const std::array inputs{in};
  OutputSet out;
  out.add(o.output, Json{{"manifest", manifest("cone", config, inputs)},
                         {"root", canonicalize(d).str()},
                         {"cone", io::cone_json(cone, o.steps, o.cap)}});
  if (!o.dot.empty()) out.add(o.dot, cone.to_dot());
  out.commit();
}

// ---------------------------------------------------------------------------

struct ClassifyOptions {
  std::vector<std::string> inputs;
  std::string output;
};

void run_classify(const ClassifyOptions& o) {
  std::vector<Input> inputs;
  std::vector<Dendrogram> ds;
  for (const auto& path : o.inputs) {
    inputs.push_back(read_input(path));
    ds.push_back(require_dendrogram(load_dendrogram(inputs.back()), path));
  }
  const auto c = classify_ensemble(ds);
  OutputSet out;
  out.add(o.output, Json{{"manifest", manifest("classify", Json::object(), inputs)},
                         {"files", o.inputs},
                         {"classification", io::classification_json(c)}});
  out.commit();
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::size_t n = 8;
  std::uint64_t seed = 0;
  std::string schedule, out_dir;
  std::size_t max_branches = std::size_t{1} << 20;
};

std::string selector_text(const ThetaSelector& s) {
  if (std::holds_alternative<SelectAll>(s)) return "all";
  if (const auto* o = std::get_if<SelectObserverClass>(&s)) return "observer:" + std::to_string(o->observer);
  return std::get<CanonicalForm>(s).str();
}

void run_simulate(const SimulateOptions& o) {
  std::vector<Input> inputs;
  io::Schedule schedule;
  if (!o.schedule.empty()) {
    inputs.push_back(read_input(o.schedule));
    try {
      schedule = io::parse_schedule(parse_json(inputs.back()));
    } catch (const Error& e) {
      throw Error(e.kind(), o.schedule + ": " + e.detail());
    }
  }
  Ensemble ensemble = schedule.observers ? *schedule.observers : init_ensemble(o.n, o.seed);
  check_ensemble(ensemble);
  WorldLedger ledger = make_ledger(canonicalize(ensemble.front().dendrogram()));

  Json history = Json::array();
  for (std::size_t k = 0; k < schedule.rounds.size(); ++k) {
    const auto& round = schedule.rounds[k];
    const auto selected = resolve_selector(ensemble, round.selector);
    auto r = measure(ensemble, selected, round.targets, ledger);
    if (r.ledger.branches.size() > o.max_branches) {
      throw Error(ErrorKind::InvalidArgument, "round " + std::to_string(k) + " would create " +
                                                  std::to_string(r.ledger.branches.size()) + " branches");
    }
    check_ensemble(r.ensemble);
    DHT_ENSURE(r.ledger.total_probability() == 1, "ledger is not normalized");

    Json eigen = Json::array();
    for (std::size_t i = 0; i < r.eigen.support.size(); ++i) {
      eigen.push_back(Json{{"index", i}, {"value", r.eigen.support[i].to_string()},
                           {"a_squared", to_string(r.eigen.mass[i])}});
    }
    Json splits = Json::array();
    for (const auto& s : r.classes) {
      splits.push_back(Json{{"canonical", s.form.str()}, {"members", s.members}, {"b", to_string(s.fraction)}});
    }
    Json selected_forms = Json::array();
    for (const auto& c : selected) selected_forms.push_back(c.form.str());
    ensemble = std::move(r.ensemble);
    ledger = std::move(r.ledger);
    const auto classes = theta_classes(ensemble);
    history.push_back(Json{{"round", k},
                           {"selector", selector_text(round.selector)},
                           {"selected", std::move(selected_forms)},
                           {"targets", round.targets},
                           {"eigenbasis", std::move(eigen)},
                           {"splits", std::move(splits)},
                           {"classes_after", io::theta_classes_json(classes)},
                           {"branches", ledger.branches.size()}});
  }

  const Json config{{"n", schedule.observers ? ensemble.size() : o.n},
                    {"seed", o.seed},
                    {"explicit_observers", schedule.observers.has_value()},
                    {"rounds", schedule.rounds.size()},
                    {"max_branches", o.max_branches}};
  Json observers = Json::array();
  for (const auto& obs : ensemble) observers.push_back(io::observer_json(obs));
  const auto lines = world_lines(ledger);

  const fs::path dir = o.out_dir;
  OutputSet out;
  out.add(dir / "ledger.json", Json{{"manifest", manifest("simulate", config, inputs)},
                                    {"ledger", io::ledger_json(ledger)},
                                    {"observers", std::move(observers)}});
  out.add(dir / "world_lines.csv", io::world_lines_csv(lines));
  out.add(dir / "theta_history.json", Json{{"manifest", manifest("simulate", config, inputs)},
                                           {"initial_theta", ledger.branches.empty() ? "" : ledger.branches.front().theta_path.front().str()},
                                           {"rounds", std::move(history)},
                                           {"final_classes", io::theta_classes_json(theta_classes(ensemble))}});
  out.commit();
}

// ---------------------------------------------------------------------------

struct CompareOptions {
  std::string input, output;
  std::string metric = "euclidean", linkage_a = "single", linkage_b = "complete", duplicates = "reject";
  bool header = false;
  EmergeFlags flags;
};

void run_compare(const CompareOptions& o) {
  const auto in = read_input(o.input);
  const auto events = load_csv(in, o.header, o.duplicates);
  const auto cfg = emergence_config(o.flags);

  struct Side {
    std::string linkage;
    Dendrogram d;
    EmergenceSummary s;
  };
  auto evaluate = [&](const std::string& linkage) {
    auto d = agglomerate(events, linkage_spec(o.metric, linkage));
    std::vector<DyadicRational> values;
    for (const auto& c : d.leaf_codes()) values.push_back(monna_map(c));
    auto r = run_emergence(values, cfg);
    return Side{linkage, std::move(d), r.summary};
  };
  const Side a = evaluate(o.linkage_a);
  const Side b = evaluate(o.linkage_b);

  auto side_json = [](const Side& s) {
    return Json{{"linkage", s.linkage},
                {"canonical", canonicalize(s.d).str()},
                {"dendrogram", io::dendrogram_json(s.d)},
                {"summary", io::summary_json(s.s)}};
  };
  Json config = emerge_flags_json(o.flags);
  config["metric"] = o.metric;
  config["linkage_a"] = o.linkage_a;
  config["linkage_b"] = o.linkage_b;
  config["header"] = o.header;
  config["duplicates"] = o.duplicates;
  const std::array inputs{in};
  OutputSet out;
  out.add(o.output,
          Json{{"manifest", manifest("compare-linkage", config, inputs)},
               {"a", side_json(a)},
               {"b", side_json(b)},
               {"same_shape", canonicalize(a.d) == canonicalize(b.d)},
               {"difference",
                {{"T_exact", to_string(a.s.t_exact - b.s.t_exact)},
                 {"T", a.s.t - b.s.t},
                 {"action", a.s.action - b.s.action},
                 {"max_abs_hj_residual", a.s.max_abs_hj_residual - b.s.max_abs_hj_residual},
                 {"max_abs_continuity_literal", a.s.max_abs_continuity_literal - b.s.max_abs_continuity_literal},
                 {"max_abs_continuity_standard",
                  a.s.max_abs_continuity_standard - b.s.max_abs_continuity_standard}}}});
  out.commit();
}

std::string active_command(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    for (const char* c : kCommands) {
      if (args[i] == c) return c;
    }
  }
  return {};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dendrogram, emergence and observer-ensemble toolkit", "dht"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.config_formatter(std::make_shared<JsonConfig>(active_command(args)));
  app.set_config("--config", "", "JSON file with one object per subcommand, keyed by long flag name");
  app.allow_config_extras(CLI::config_extras_mode::error);

  ClusterOptions cluster;
  auto* c = app.add_subcommand("cluster", "Cluster a CSV of event feature rows into a 2-adic dendrogram");
  c->add_option("input", cluster.input, "CSV file, one event per row")->required()->check(CLI::ExistingFile);
  c->add_option("-o,--output", cluster.output, "Dendrogram JSON to write")->required();
  c->add_option("--metric", cluster.metric)->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
  c->add_option("--linkage", cluster.linkage)->check(CLI::IsMember({"single", "complete", "average"}));
  c->add_option("--duplicates", cluster.duplicates, "Duplicate rows: reject or jitter")
      ->check(CLI::IsMember({"reject", "jitter"}));
  c->add_flag("--header", cluster.header, "First row is a header");
  c->add_option("--transitions", cluster.transitions,
                "Also write the re-clustering transition check (prefix k vs k+1 events) to this JSON file");

  EmergeOptions emerge;
  auto* e = app.add_subcommand("emerge", "Emergent fields and summary for a dendrogram's events");
  e->add_option("input", emerge.input, "Dendrogram JSON (\"leaves\" and/or \"events\")")
      ->required()
      ->check(CLI::ExistingFile);
  e->add_option("-o,--out-dir", emerge.out_dir, "Directory for summary.json and field CSVs")->required();
  add_emerge_flags(e, emerge.flags);
  e->add_option("--continuity-form", emerge.continuity_form)
      ->check(CLI::IsMember({"literal-squared", "standard-flux", "both"}));
  e->add_flag("--uniform-rho", emerge.uniform_rho, "Replace the difference density by the uniform density");

  ConeOptions cone;
  auto* k = app.add_subcommand("cone", "Future light cone of a dendrogram shape");
  k->add_option("input", cone.input, "Dendrogram JSON")->required()->check(CLI::ExistingFile);
  k->add_option("-o,--output", cone.output, "Cone JSON to write")->required();
  k->add_option("--steps", cone.steps, "Maximum number of insertions");
  k->add_option("--cap", cone.cap, "Maximum number of member shapes")->check(CLI::PositiveNumber);
  k->add_option("--dot", cone.dot, "Also write the cone as a Graphviz DOT file");

  ClassifyOptions classify;
  auto* m = app.add_subcommand("classify", "Pairwise causal relations between dendrograms");
  m->add_option("inputs", classify.inputs, "Dendrogram JSON files")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  m->add_option("-o,--output", classify.output, "Verdict matrix JSON to write")->required();

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Observer ensemble measuring itself; world ledger");
  s->add_option("--n", sim.n, "Number of observers");
  s->add_option("--seed", sim.seed, "Seed for the initial ensemble");
  s->add_option("--schedule", sim.schedule, "Schedule JSON (list of rounds, or {observers, rounds})")
      ->check(CLI::ExistingFile);
  s->add_option("-o,--out-dir", sim.out_dir, "Directory for ledger.json, world_lines.csv, theta_history.json")
      ->required();
  s->add_option("--max-branches", sim.max_branches, "Abort when the ledger would exceed this many branches");

  CompareOptions compare;
  auto* l = app.add_subcommand("compare-linkage", "Emergent summaries under two linkage specifications");
  l->add_option("input", compare.input, "CSV file, one event per row")->required()->check(CLI::ExistingFile);
  l->add_option("-o,--output", compare.output, "Report JSON to write")->required();
  l->add_option("--metric", compare.metric)->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
  l->add_option("--linkage-a", compare.linkage_a)->check(CLI::IsMember({"single", "complete", "average"}));
  l->add_option("--linkage-b", compare.linkage_b)->check(CLI::IsMember({"single", "complete", "average"}));
  l->add_option("--duplicates", compare.duplicates)->check(CLI::IsMember({"reject", "jitter"}));
  l->add_flag("--header", compare.header, "First row is a header");
  add_emerge_flags(l, compare.flags);

  for (auto* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (c->parsed()) run_cluster(cluster);
    else if (e->parsed()) run_emerge(emerge);
    else if (k->parsed()) run_cone(cone);
    else if (m->parsed()) run_classify(classify);
    else if (s->parsed()) run_simulate(sim);
    else if (l->parsed()) run_compare(compare);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  } catch (const InvariantViolation& ex) {
    err << "internal error: " << ex.what() << '\n';
    return kInvariantViolation;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << '\n';
    return kInvariantViolation;
  }
  return kOk;
}

}  // namespace dht::cli
