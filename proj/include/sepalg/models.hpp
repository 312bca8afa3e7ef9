#pragma once

#include <map>

#include "sepalg/local_function.hpp"

namespace sepalg {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration for the heap-flavoured models. Lists are canonicalized
/// (sorted, deduplicated) by the builders.
struct ModelConfig {
  std::vector<int> locations;
  std::vector<int> values;
  std::vector<std::string> variables;
};

/// One heap-model state: a finite map from locations to values, a finite
/// map from variables to values, and (free-set model only) an optional set
/// of free locations disjoint from the heap domain. Kept sorted.
struct HeapState {
  std::vector<std::pair<int, int>> heap;
  std::vector<std::pair<std::string, int>> stack;
  std::optional<std::vector<int>> free_locations;

  void normalize();
  bool is_unit() const { return heap.empty() && stack.empty() && !free_locations; }

  friend bool operator==(const HeapState&, const HeapState&) = default;
  friend auto operator<=>(const HeapState&, const HeapState&) = default;
};

/// Display form: variables, then heap cells, then the free set, joined by
/// " * "; the empty state is "u".
std::string state_label(const HeapState& s);

/// Partial composition: undefined on overlapping heap or stack domains, on
/// two free sets, or on a free set meeting the other side's locations.
std::optional<HeapState> compose_states(const HeapState& a, const HeapState& b);

enum class ModelKind { plain_heap, stack_heap, freeset_heap, zmod, table };

/// A sealed algebra together with the model-level structure used to parse
/// and print elements.
struct BuiltModel {
  AlgebraPtr algebra;
  ModelKind kind = ModelKind::table;
  ModelConfig config;
  int modulus = 0;                // zmod only
  std::vector<HeapState> states;  // index-aligned; empty for zmod/table
  std::map<HeapState, std::uint32_t> state_index;

  std::optional<ElementId> find_state(const HeapState& s) const;

  /// Exact label lookup, falling back to component-wise parsing for heap
  /// models ("x->1 * 1->7 * F{2}", any component order) and to integer
  /// normalization for modular models.
  std::optional<ElementId> parse_element(std::string_view text) const;
};

/// All finite partial maps locations -> values under disjoint union.
BuiltModel build_plain_heap(const ModelConfig& cfg,
                            std::size_t max_elements = kDefaultMaxElements);

/// Partial maps over locations and variables; requires values to contain
/// every location so variables can hold addresses.
BuiltModel build_stack_heap(const ModelConfig& cfg,
                            std::size_t max_elements = kDefaultMaxElements);

/// Stack-heap states optionally extended with one free set disjoint from
/// the state's heap domain.
BuiltModel build_freeset_heap(const ModelConfig& cfg,
                              std::size_t max_elements = kDefaultMaxElements);

/// {0..n-1} under addition mod n; total, cancellative, not well-founded.
BuiltModel build_zmod(int n, std::size_t max_elements = kDefaultMaxElements);

struct TableBuild {
  ValidationReport report;
  std::optional<BuiltModel> model;  // present iff report.passed
};

/// Wraps a user-supplied composition table; the report carries any law
/// violations instead of throwing.
TableBuild build_table(const RawTable& table, std::size_t max_elements = kDefaultMaxElements);

/// Names one primitive command over a model.
struct CommandDescriptor {
  enum class Kind { dispose_loc, alloc, dispose_var, mutate, lookup, adder, multiplier };

  Kind kind;
  int location = 0;  // dispose_loc
  std::string var;   // alloc, dispose_var, mutate, lookup (target)
  std::string var2;  // lookup (destination)
  int value = 0;     // mutate
  int constant = 0;  // adder, multiplier

  std::string text() const;
};

/// The command's raw outcome table, unverified. Useful for reporting
/// locality verdicts on commands that are not local.
RawAction primitive_action(const BuiltModel& model, const CommandDescriptor& cmd);

/// Sealed command; throws NonLocalError for non-local descriptors (the
/// modular multiplier with factor != 1).
LocalFunction primitive(const BuiltModel& model, const CommandDescriptor& cmd);

}  // namespace sepalg
