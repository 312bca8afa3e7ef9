#pragma once

#include "json.hpp"
#include "sepalg/models.hpp"
#include "sepalg/proof.hpp"

namespace sepalg {

/// Thrown on malformed documents: bad field types, unknown labels, unknown
/// rule names.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Predicates serialize as arrays of element labels in carrier order;
/// parsing accepts anything model.parse_element() accepts.
nlohmann::json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::json& j, const BuiltModel& model);

/// {"fault": true} or {"states": [...]}.
nlohmann::json outcome_to_json(const Outcome& o);
Outcome outcome_from_json(const nlohmann::json& j, const BuiltModel& model);

/// {"pre": [...], "post": [...]}.
nlohmann::json statement_to_json(const Statement& s);
Statement statement_from_json(const nlohmann::json& j, const BuiltModel& model);

/// Array of statements.
nlohmann::json spec_to_json(const Specification& spec);
Specification spec_from_json(const nlohmann::json& j, const BuiltModel& model);

/// Node: {"rule": ..., "conclusion": ..., "premises": [...], "frame": [...]}.
nlohmann::json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j, const BuiltModel& model);

nlohmann::json validation_report_to_json(const ValidationReport& report);

struct ModelLoad {
  std::optional<BuiltModel> model;
  ValidationReport report;      // table kind only
  bool table_failed = false;    // table kind failed validation
};

/// Builds the model named by an algebra descriptor object:
///   {"kind": "plain_heap"|"stack_heap"|"freeset_heap", "locations": [...],
///    "values": [...], "variables": [...]}
///   {"kind": "zmod", "modulus": n}
///   {"kind": "table", "elements": [...], "unit": ..., "compose": [[a,b,c]...]}
/// Config errors throw; a table that fails the laws is reported, not thrown.
ModelLoad model_from_json(const nlohmann::json& j, std::size_t max_elements);

}  // namespace sepalg
