#pragma once

#include "sepalg/outcome.hpp"

namespace sepalg {

class LocalFunction;
class Specification;

/// Unverified total function on one algebra's carrier: one outcome per
/// element, indexed by carrier order.
struct RawAction {
  AlgebraPtr algebra;
  std::vector<Outcome> outcomes;
  std::string name;
};

/// Witness that locality fails: f(frame * state) is not below
/// {frame} * f(state). Either the left side is Fault and the right is not,
/// or `offending` names a state on the left that the right side misses.
struct LocalityCounterexample {
  ElementId frame;
  ElementId state;
  bool lhs_fault = false;
  std::optional<ElementId> offending;
};

struct LocalityVerdict {
  bool local = false;
  std::optional<LocalityCounterexample> counterexample;
};

/// Exhaustively checks the locality inequality over all compatible
/// (frame, state) pairs, frames ascending in the outer loop. Returns the
/// first failing pair.
LocalityVerdict check_locality(const RawAction& action);

class NonLocalError : public std::runtime_error {
 public:
  NonLocalError(std::string message, std::string function_name,
                std::optional<LocalityCounterexample> counterexample, AlgebraPtr algebra)
      : std::runtime_error(std::move(message)),
        function_name(std::move(function_name)),
        counterexample(std::move(counterexample)),
        algebra(std::move(algebra)) {}

  std::string function_name;
  std::optional<LocalityCounterexample> counterexample;
  AlgebraPtr algebra;  // keeps the counterexample's handles valid
};

/// Combinators produce local functions by construction; this controls
/// whether they re-verify the invariant anyway. debug_only re-verifies in
/// builds without NDEBUG.
enum class VerifyMode { off, debug_only, always };

VerifyMode combinator_verification();
void set_combinator_verification(VerifyMode mode);

namespace detail {
LocalFunction make_trusted_local_function(AlgebraPtr algebra, std::vector<Outcome> outcomes,
                                          std::string name);
}

/// A verified local function: total on the carrier and satisfying
/// f(frame * state) <= {frame} * f(state) for all compatible pairs.
/// Instances come from seal() (which checks) or from the combinators
/// (which preserve the invariant).
class LocalFunction {
 public:
  /// Verifies locality; throws NonLocalError with a counterexample.
  static LocalFunction seal(RawAction action);

  const AlgebraPtr& algebra() const { return algebra_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return outcomes_.size(); }

  const Outcome& apply(ElementId e) const;
  const Outcome& apply_index(std::uint32_t i) const { return outcomes_[i]; }
  std::span<const Outcome> outcomes() const { return outcomes_; }

  /// Ignores the name: equal when the outcomes agree pointwise.
  friend bool operator==(const LocalFunction& a, const LocalFunction& b) {
    return a.algebra_.get() == b.algebra_.get() && a.outcomes_ == b.outcomes_;
  }

 private:
  LocalFunction(AlgebraPtr algebra, std::vector<Outcome> outcomes, std::string name)
      : algebra_(std::move(algebra)), outcomes_(std::move(outcomes)), name_(std::move(name)) {}

  friend LocalFunction detail::make_trusted_local_function(AlgebraPtr, std::vector<Outcome>,
                                                           std::string);

  AlgebraPtr algebra_;
  std::vector<Outcome> outcomes_;
  std::string name_;
};

/// Identity: skip(s) = {s}.
LocalFunction skip(AlgebraPtr algebra);

/// Sequential composition: (f ; g)(s) = g lifted over f(s).
LocalFunction seq(const LocalFunction& f, const LocalFunction& g);

/// Nondeterministic choice: pointwise join.
LocalFunction choice(const LocalFunction& f, const LocalFunction& g);

/// Kleene star: join of all finite iterates, computed as the limit of the
/// ascending chain h0 = skip, h(n+1) = skip + f;hn.
LocalFunction kstar(const LocalFunction& f);

/// Join of f over a set of start states; empty set diverges.
Outcome apply_lifted(const LocalFunction& f, const Predicate& states);

/// Fault propagates; otherwise lifts over the state set.
Outcome apply_lifted(const LocalFunction& f, const Outcome& outcome);

/// Best outcome at `state` derivable from f's values on strict substates:
/// the meet over all strict decompositions state = delta * sub of
/// {delta} * f(sub). The empty meet (at the unit) is Fault.
Outcome local_limit(const LocalFunction& f, ElementId state);

/// Same meet restricted to substates in `from`, not strict: sub may be
/// `state` itself when `from` contains it.
Outcome local_limit_by(const Predicate& from, const LocalFunction& f, ElementId state);

/// States where f knows strictly more than its strict substates imply:
/// f(s) strictly below local_limit(f, s).
Predicate footprints(const LocalFunction& f);

/// States where f does not fault.
Predicate safe_states(const LocalFunction& f);

/// Safe states with no strictly smaller safe state.
Predicate min_safe_states(const LocalFunction& f);

struct DetConstCounterexample {
  ElementId frame;
  ElementId state;   // a safe state of f
  Outcome lhs;       // f lifted over {frame} * {state}
  Outcome rhs;       // {frame} * f(state)
};

struct DetConstVerdict {
  bool holds = false;
  std::optional<DetConstCounterexample> counterexample;
};

/// Checks that framing commutes with application on the nose: for every
/// safe state s and every frame r, f lifted over {r} * {s} equals
/// {r} * f(s). Scans states ascending, reporting the smallest violating
/// frame for the first violating state.
DetConstVerdict determinism_constancy(const LocalFunction& f);

}  // namespace sepalg
