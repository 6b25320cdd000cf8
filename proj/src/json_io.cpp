#include "dht/json_io.hpp"

#include <charconv>
#include <sstream>

#include "dht/error.hpp"

namespace dht::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where + " must be a string");
  return j.get<std::string>();
}

std::size_t as_index(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) fail(where + " must be a non-negative integer");
  return j.get<std::size_t>();
}

DyadicRational parse_value(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return DyadicRational(j.get<long>());
  return DyadicRational::parse(as_string(j, where));
}

std::vector<EdgeCode> parse_codes(const Json& leaves) {
  if (!leaves.is_array()) fail("\"leaves\" must be an array of edge codes");
  std::vector<EdgeCode> codes;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto text = as_string(leaves[i], "leaves[" + std::to_string(i) + "]");
    try {
      codes.push_back(EdgeCode::parse(text));
    } catch (const Error& e) {
      fail("leaves[" + std::to_string(i) + "]: " + e.detail());
    }
  }
  return codes;
}

std::vector<DyadicRational> parse_values(const Json& arr, const char* name) {
  if (!arr.is_array()) fail(std::string("\"") + name + "\" must be an array");
  std::vector<DyadicRational> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_value(arr[i], std::string(name) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json values_json(std::span<const DyadicRational> values) {
  Json arr = Json::array();
  for (const auto& v : values) arr.push_back(v.to_string());
  return arr;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string record_text(const std::vector<std::optional<Outcome>>& record) {
  std::string out;
  for (std::size_t r = 0; r < record.size(); ++r) {
    if (r > 0) out += '|';
    if (!record[r]) {
      out += '-';
      continue;
    }
    for (std::size_t t = 0; t < record[r]->targets.size(); ++t) {
      if (t > 0) out += ';';
      out += std::to_string(record[r]->targets[t]);
    }
    out += ':' + std::to_string(record[r]->eigen_index);
  }
  return out;
}

}  // namespace

std::vector<DyadicRational> DendrogramDoc::emergence_events() const {
  if (events) return *events;
  std::vector<DyadicRational> out;
  for (const auto& c : dendrogram->leaf_codes()) out.push_back(monna_map(c));
  return out;
}

Json dendrogram_json(const Dendrogram& d, std::span<const DyadicRational> events) {
  Json j;
  Json leaves = Json::array();
  for (const auto& c : d.leaf_codes()) leaves.push_back(c.to_string());
  j["leaves"] = std::move(leaves);
  j["canonical"] = canonicalize(d).str();
  j["text"] = d.to_text();
  j["theta"] = theta_json(theta_descriptor(d));
  if (!events.empty()) j["events"] = values_json(events);
  return j;
}

DendrogramDoc parse_dendrogram(const Json& j) {
  if (!j.is_object()) fail("dendrogram document must be a JSON object");
  DendrogramDoc doc;
  if (j.contains("leaves")) {
    const auto codes = parse_codes(j.at("leaves"));
    doc.dendrogram = Dendrogram::from_leaf_codes(codes);
  }
  if (j.contains("events")) doc.events = parse_values(j.at("events"), "events");
  if (!doc.dendrogram && !doc.events) fail("dendrogram document needs \"leaves\" or \"events\"");
  return doc;
}

Json theta_json(const ThetaDescriptor& t) {
  return Json{{"leaf_count", t.leaf_count},
              {"max_depth", t.max_depth},
              {"mean_distance", t.mean_distance},
              {"depth_entropy_bits", t.depth_entropy}};
}

Json verdict_json(const CausalVerdict& v) {
  Json j{{"relation", to_string(v.relation)}, {"direction", to_string(v.direction)}};
  j["witness"] = v.witness ? Json(*v.witness) : Json(nullptr);
  return j;
}

Json cone_json(const Cone& cone, std::size_t steps, std::size_t cap) {
  Json layers = Json::array();
  for (const auto& layer : cone.layers) {
    Json l = Json::array();
    for (const auto& f : layer) l.push_back(f.str());
    layers.push_back(std::move(l));
  }
  Json members = Json::array();
  for (const auto& f : cone.members()) members.push_back(f.str());
  return Json{{"steps", steps},       {"cap", cap},
              {"truncated", cone.truncated}, {"size", cone.size()},
              {"members", std::move(members)}, {"layers", std::move(layers)}};
}

Json classification_json(const EnsembleClassification& c) {
  Json forms = Json::array();
  Json thetas = Json::array();
  for (std::size_t i = 0; i < c.forms.size(); ++i) {
    forms.push_back(c.forms[i].str());
    thetas.push_back(theta_json(c.descriptors[i]));
  }
  Json matrix = Json::array();
  for (const auto& row : c.matrix) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(verdict_json(v));
    matrix.push_back(std::move(r));
  }
  return Json{{"canonical", std::move(forms)},
              {"theta", std::move(thetas)},
              {"matrix", std::move(matrix)},
              {"fractions",
               {{"identical", c.identical_fraction},
                {"timelike", c.timelike_fraction},
                {"spacelike", c.spacelike_fraction}}},
              {"future_count", c.future_count},
              {"past_count", c.past_count}};
}

Json summary_json(const EmergenceSummary& s) {
  return Json{{"T", s.t},
              {"T_exact", to_string(s.t_exact)},
              {"P_global", s.p_global},
              {"action", s.action},
              {"steps", s.steps},
              {"max_abs_hj_residual", s.max_abs_hj_residual},
              {"max_abs_continuity_literal", s.max_abs_continuity_literal},
              {"max_abs_continuity_standard", s.max_abs_continuity_standard}};
}

Json observer_json(const Observer& o) {
  Json log = Json::array();
  for (const auto& e : o.measurement_log()) {
    log.push_back(Json{{"target", e.target}, {"recorded", e.recorded.to_string()}});
  }
  Json j{{"id", o.id()},
         {"objective_code", o.objective_code().to_string()},
         {"objective_value", objective_value(o).to_string()}};
  j["dendrogram"] = dendrogram_json(o.dendrogram(), o.event_values());
  j["measurement_log"] = std::move(log);
  return j;
}

Json theta_classes_json(std::span<const ThetaClass> classes) {
  Json arr = Json::array();
  for (const auto& c : classes) {
    arr.push_back(Json{{"canonical", c.form.str()}, {"members", c.members}, {"theta", theta_json(c.descriptor)}});
  }
  return arr;
}

Json ledger_json(const WorldLedger& ledger) {
  Json branches = Json::array();
  for (const auto& b : ledger.branches) {
    Json record = Json::array();
    for (const auto& r : b.record) {
      record.push_back(r ? Json{{"targets", r->targets}, {"eigen_index", r->eigen_index}} : Json(nullptr));
    }
    Json path = Json::array();
    for (const auto& f : b.theta_path) path.push_back(f.str());
    branches.push_back(Json{{"probability", to_string(b.probability)},
                            {"amplitude", {{"re", b.amplitude()}, {"im", 0.0}}},
                            {"record", std::move(record)},
                            {"theta", b.theta().str()},
                            {"theta_path", std::move(path)}});
  }
  return Json{{"generation", ledger.generation},
              {"total_probability", to_string(ledger.total_probability())},
              {"branches", std::move(branches)}};
}

std::string field_csv(const RealField& f) {
  std::string out = "cell_center,value_real,value_imag\n";
  for (std::size_t c = 0; c < f.size(); ++c) {
    out += format_double(f.grid.center(c)) + ',' + format_double(f.values[c]) + ",0\n";
  }
  return out;
}

std::string field_csv(const ComplexField& f) {
  std::string out = "cell_center,value_real,value_imag\n";
  for (std::size_t c = 0; c < f.size(); ++c) {
    out += format_double(f.grid.center(c)) + ',' + format_double(f.values[c].real()) + ',' +
           format_double(f.values[c].imag()) + '\n';
  }
  return out;
}

std::string world_lines_csv(std::span<const WorldLine> lines) {
  std::string out = "record,theta_path,probability,probability_exact\n";
  for (const auto& w : lines) {
    std::string path;
    for (std::size_t k = 0; k < w.theta_path.size(); ++k) {
      if (k > 0) path += " > ";
      path += w.theta_path[k].str();
    }
    out += csv_quote(record_text(w.record)) + ',' + csv_quote(path) + ',' +
           format_double(w.probability.get_d()) + ',' + to_string(w.probability) + '\n';
  }
  return out;
}

namespace {

Round parse_round(const Json& j, std::size_t index) {
  const std::string where = "rounds[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(where + " must be an object");
  Round r;
  const auto& theta = require(j, "theta");
  if (theta.is_number_unsigned()) {
    r.selector = SelectObserverClass{theta.get<std::size_t>()};
  } else {
    const auto s = as_string(theta, where + ".theta");
    if (s == "all") {
      r.selector = SelectAll{};
    } else {
      try {
        r.selector = canonicalize(Dendrogram::from_shape(s));
      } catch (const Error& e) {
        fail(where + ".theta: " + e.detail());
      }
    }
  }
  const auto& targets = require(j, "targets");
  if (!targets.is_array()) fail(where + ".targets must be an array");
  for (std::size_t t = 0; t < targets.size(); ++t) {
    r.targets.push_back(as_index(targets[t], where + ".targets[" + std::to_string(t) + "]"));
  }
  return r;
}

Observer parse_observer(const Json& j, std::size_t id) {
  const std::string where = "observers[" + std::to_string(id) + "]";
  if (!j.is_object()) fail(where + " must be an object");
  const auto code = EdgeCode::parse(as_string(require(j, "objective_code"), where + ".objective_code"));
  const auto codes = parse_codes(require(j, "leaves"));
  auto events = parse_values(require(j, "events"), "events");
  if (events.size() != codes.size()) fail(where + ": one event per leaf is required");
  return Observer(id, std::move(events), Dendrogram::from_leaf_codes(codes), code);
}

}  // namespace

Schedule parse_schedule(const Json& j) {
  Schedule s;
  const Json* rounds = &j;
  if (j.is_object()) {
    rounds = &require(j, "rounds");
    if (j.contains("observers")) {
      const auto& obs = j.at("observers");
      if (!obs.is_array()) fail("\"observers\" must be an array");
      Ensemble e;
      for (std::size_t k = 0; k < obs.size(); ++k) e.push_back(parse_observer(obs[k], k));
      if (e.size() < 2) throw Error(ErrorKind::TooFewObservers, "an ensemble needs >= 2 observers");
      s.observers = std::move(e);
    }
  }
  if (!rounds->is_array()) fail("schedule rounds must be an array");
  for (std::size_t k = 0; k < rounds->size(); ++k) s.rounds.push_back(parse_round((*rounds)[k], k));
  return s;
}

}  // namespace dht::io
