#include "sepalg/io.hpp"

namespace sepalg {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end())
    throw FormatError(std::string(what) + " is missing the '" + key + "' field");
  return *it;
}

std::string require_string(const json& j, const char* what) {
  if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

ElementId parse_label(const json& j, const BuiltModel& model, const char* what) {
  const std::string label = require_string(j, what);
  auto e = model.parse_element(label);
  if (!e) throw FormatError(std::string("unknown element '") + label + "'");
  return *e;
}

}  // namespace

nlohmann::json predicate_to_json(const Predicate& p) {
  json out = json::array();
  const SeparationAlgebra& alg = *p.algebra();
  p.for_each_index([&](std::uint32_t i) { out.push_back(alg.label_at(i)); });
  return out;
}

Predicate predicate_from_json(const nlohmann::json& j, const BuiltModel& model) {
  if (!j.is_array()) throw FormatError("a predicate must be an array of element labels");
  Predicate p(model.algebra);
  for (const auto& item : j) p.insert(parse_label(item, model, "a predicate entry"));
  return p;
}

nlohmann::json outcome_to_json(const Outcome& o) {
  if (o.is_fault()) return json{{"fault", true}};
  return json{{"states", predicate_to_json(o.states())}};
}

Outcome outcome_from_json(const nlohmann::json& j, const BuiltModel& model) {
  if (!j.is_object()) throw FormatError("an outcome must be an object");
  if (j.value("fault", false)) return Outcome::fault(model.algebra);
  return Outcome(predicate_from_json(require_field(j, "states", "a non-fault outcome"), model));
}

nlohmann::json statement_to_json(const Statement& s) {
  return json{{"pre", predicate_to_json(s.pre)}, {"post", predicate_to_json(s.post)}};
}

Statement statement_from_json(const nlohmann::json& j, const BuiltModel& model) {
  if (!j.is_object()) throw FormatError("a statement must be an object");
  return Statement{predicate_from_json(require_field(j, "pre", "a statement"), model),
                   predicate_from_json(require_field(j, "post", "a statement"), model)};
}

nlohmann::json spec_to_json(const Specification& spec) {
  json out = json::array();
  for (const Statement& s : spec.statements()) out.push_back(statement_to_json(s));
  return out;
}

Specification spec_from_json(const nlohmann::json& j, const BuiltModel& model) {
  if (!j.is_array()) throw FormatError("a specification must be an array of statements");
  Specification spec(model.algebra);
  for (const auto& item : j) spec.add(statement_from_json(item, model));
  return spec;
}

namespace {

json node_to_json(const DerivationNode& node) {
  json out{{"rule", std::string(rule_name(node.rule))},
           {"conclusion", statement_to_json(node.conclusion)}};
  if (!node.premises.empty()) {
    json premises = json::array();
    for (const DerivationNode& p : node.premises) premises.push_back(node_to_json(p));
    out["premises"] = std::move(premises);
  }
  if (node.frame) out["frame"] = predicate_to_json(*node.frame);
  return out;
}

DerivationNode node_from_json(const json& j, const BuiltModel& model) {
  if (!j.is_object()) throw FormatError("a derivation node must be an object");
  const std::string name = require_string(require_field(j, "rule", "a derivation node"),
                                          "a derivation node's rule");
  auto rule = rule_from_name(name);
  if (!rule) throw FormatError("unknown rule '" + name + "'");
  DerivationNode node{*rule,
                      statement_from_json(require_field(j, "conclusion", "a derivation node"),
                                          model),
                      {},
                      {}};
  if (auto it = j.find("premises"); it != j.end()) {
    if (!it->is_array()) throw FormatError("derivation premises must be an array");
    for (const auto& p : *it) node.premises.push_back(node_from_json(p, model));
  }
  if (auto it = j.find("frame"); it != j.end())
    node.frame = predicate_from_json(*it, model);
  return node;
}

}  // namespace

nlohmann::json derivation_to_json(const Derivation& d) { return node_to_json(d.root); }

Derivation derivation_from_json(const nlohmann::json& j, const BuiltModel& model) {
  return Derivation{node_from_json(j, model)};
}

nlohmann::json validation_report_to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const LawViolation& v : report.violations)
    violations.push_back(json{{"law", v.law}, {"witness", v.witness}});
  return json{{"passed", report.passed},
              {"size_guard_exceeded", report.size_guard_exceeded},
              {"truncated", report.truncated},
              {"violations", std::move(violations)}};
}

ModelLoad model_from_json(const nlohmann::json& j, std::size_t max_elements) {
  if (!j.is_object()) throw FormatError("the algebra descriptor must be an object");
  const std::string kind =
      require_string(require_field(j, "kind", "the algebra descriptor"), "the algebra kind");

  auto read_ints = [&](const char* key) {
    std::vector<int> out;
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_array()) throw FormatError(std::string("'") + key + "' must be an array");
      for (const auto& v : *it) {
        if (!v.is_number_integer())
          throw FormatError(std::string("'") + key + "' entries must be integers");
        out.push_back(v.get<int>());
      }
    }
    return out;
  };

  ModelLoad load;
  if (kind == "plain_heap" || kind == "stack_heap" || kind == "freeset_heap") {
    ModelConfig cfg;
    cfg.locations = read_ints("locations");
    cfg.values = read_ints("values");
    if (auto it = j.find("variables"); it != j.end()) {
      if (!it->is_array()) throw FormatError("'variables' must be an array");
      for (const auto& v : *it) cfg.variables.push_back(require_string(v, "a variable name"));
    }
    if (kind == "plain_heap")
      load.model = build_plain_heap(cfg, max_elements);
    else if (kind == "stack_heap")
      load.model = build_stack_heap(cfg, max_elements);
    else
      load.model = build_freeset_heap(cfg, max_elements);
    load.report.passed = true;
    return load;
  }
  if (kind == "zmod") {
    const json& m = require_field(j, "modulus", "a modular algebra descriptor");
    if (!m.is_number_integer()) throw FormatError("'modulus' must be an integer");
    load.model = build_zmod(m.get<int>(), max_elements);
    load.report.passed = true;
    return load;
  }
  if (kind == "table") {
    RawTable t;
    const json& elements = require_field(j, "elements", "a table descriptor");
    if (!elements.is_array()) throw FormatError("'elements' must be an array");
    for (const auto& e : elements) t.elements.push_back(require_string(e, "an element label"));
    t.unit = require_string(require_field(j, "unit", "a table descriptor"), "the unit label");
    const json& rows = require_field(j, "compose", "a table descriptor");
    if (!rows.is_array()) throw FormatError("'compose' must be an array of triples");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 3)
        throw FormatError("each 'compose' row must be a triple [a, b, a*b]");
      t.compose.push_back({require_string(row[0], "a compose label"),
                           require_string(row[1], "a compose label"),
                           require_string(row[2], "a compose label")});
    }
    t.origin = j.value("origin", std::string("table"));
    TableBuild built = build_table(t, max_elements);
    load.report = std::move(built.report);
    if (built.model)
      load.model = std::move(built.model);
    else
      load.table_failed = true;
    return load;
  }
  throw FormatError("unknown algebra kind '" + kind + "'");
}

}  // namespace sepalg
