#pragma once

#include "sepalg/specification.hpp"

namespace sepalg {

class RuleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Rule { Axiom, Frame, Consequence, Union, Intersection };

std::string_view rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);

/// One node of a derivation tree. Axiom leaves carry a statement that must
/// belong to the root specification; internal nodes must conclude exactly
/// what their rule produces from their premises.
struct DerivationNode {
  Rule rule = Rule::Axiom;
  Statement conclusion;
  std::vector<DerivationNode> premises;
  std::optional<Predicate> frame;  // Frame nodes only
};

struct Derivation {
  DerivationNode root;
};

/// Frame rule: (p, q) becomes (p * r, q * r).
Statement apply_frame(const Statement& s, const Predicate& r);

/// Consequence rule: shrink the precondition, grow the postcondition.
/// Throws RuleError naming the failed inclusion.
Statement apply_consequence(const Statement& s, const Predicate& new_pre,
                            const Predicate& new_post);

/// Union rule over a finite family; the empty family yields the vacuous
/// statement with empty sides.
Statement apply_union(AlgebraPtr algebra, std::span<const Statement> family);

/// Intersection rule; the family must be nonempty.
Statement apply_intersection(std::span<const Statement> family);

struct DerivationCheck {
  bool valid = false;
  std::optional<Statement> conclusion;    // root conclusion when valid
  std::vector<std::size_t> failing_path;  // child indices from the root
  std::string error;
};

/// Validates every node against its rule and the axiom pool.
DerivationCheck check_derivation(const Derivation& d, const Specification& phi);

/// Builds the constructive derivation of an entailed statement: per
/// pre-state, frame each axiom instance onto the state, intersect the
/// framed statements into the best local action's value, union over the
/// precondition, then weaken. Throws RuleError when the statement is not
/// entailed.
Derivation derive_via_bla(const Specification& phi, const Statement& goal);

}  // namespace sepalg
