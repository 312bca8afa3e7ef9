#pragma once

#include "sepalg/local_function.hpp"

namespace sepalg {

/// Hoare-style statement over one algebra: precondition and postcondition
/// state sets.
struct Statement {
  Predicate pre;
  Predicate post;

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.pre == b.pre && a.post == b.post;
  }
  friend std::strong_ordering operator<=>(const Statement& a, const Statement& b) {
    if (auto c = a.pre <=> b.pre; c != 0) return c;
    return a.post <=> b.post;
  }
};

/// Finite set of statements, kept sorted and deduplicated so equality is
/// extensional and iteration order is deterministic.
class Specification {
 public:
  explicit Specification(AlgebraPtr algebra);

  const AlgebraPtr& algebra() const { return algebra_; }
  void add(Statement s);
  const std::vector<Statement>& statements() const { return statements_; }
  std::size_t size() const { return statements_.size(); }
  bool empty() const { return statements_.empty(); }

  /// Union of all preconditions.
  Predicate domain() const;

  friend bool operator==(const Specification& a, const Specification& b) {
    return a.algebra_.get() == b.algebra_.get() && a.statements_ == b.statements_;
  }

 private:
  AlgebraPtr algebra_;
  std::vector<Statement> statements_;
};

/// f meets the statement: f(s) <= post for every s in pre.
bool satisfies(const LocalFunction& f, const Statement& s);
bool satisfies_spec(const LocalFunction& f, const Specification& spec);

/// The greatest local function satisfying the specification:
/// bla[phi](s) = meet over decompositions s = delta * sub with sub in pre,
/// (pre, post) in phi, of {delta} * post. The empty meet is Fault.
LocalFunction bla(const Specification& spec);

/// Semantic consequence, decided through the best local action.
bool entails(const Specification& spec, const Statement& s);
bool entails_spec(const Specification& spec, const Specification& target);

struct CompletenessVerdict {
  bool complete = false;
  std::optional<ElementId> witness;  // first state where bla differs from f
};

/// The specification pins f down exactly: bla(spec) == f.
CompletenessVerdict is_complete(const Specification& spec, const LocalFunction& f);

/// One singleton-precondition statement per domain state, with the best
/// local action's value there. Logically equivalent to the input.
Specification canonicalise(const Specification& spec);

/// ({s}, f(s)) for every state where f does not fault.
Specification big_spec(const LocalFunction& f);

struct BasisVerdict {
  bool basis = false;
  std::optional<ElementId> witness;  // first state the restricted limit misses
};

/// f is recoverable from its values on `from` alone:
/// local_limit_by(from, f, s) == f(s) everywhere.
BasisVerdict is_basis(const Predicate& from, const LocalFunction& f);

struct SmallSpecResult {
  std::optional<Specification> spec;
  std::optional<ElementId> no_basis_witness;

  bool has_spec() const { return spec.has_value(); }
};

/// The footprint-domain specification {({s}, f(s)) | s a footprint}, when
/// the footprints form a basis; otherwise the witness state where the
/// footprint-restricted limit disagrees with f.
SmallSpecResult small_spec(const LocalFunction& f);

}  // namespace sepalg
