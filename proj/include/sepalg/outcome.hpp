#pragma once

#include <span>

#include "sepalg/algebra.hpp"

namespace sepalg {

/// Element of the topped powerset lattice over one algebra's carrier: either
/// a set of states or the top element Fault. The empty set is the bottom
/// element (divergence). Order: p <= q iff q is Fault or p is a subset of q;
/// Fault is above everything including itself.
class Outcome {
 public:
  explicit Outcome(AlgebraPtr algebra) : states_(std::move(algebra)) {}
  explicit Outcome(Predicate states) : states_(std::move(states)) {}

  static Outcome fault(AlgebraPtr algebra) {
    Outcome o(std::move(algebra));
    o.fault_ = true;
    return o;
  }
  static Outcome diverge(AlgebraPtr algebra) { return Outcome(std::move(algebra)); }
  static Outcome single(ElementId e) { return Outcome(Predicate::single(e)); }

  const AlgebraPtr& algebra() const { return states_.algebra(); }

  bool is_fault() const { return fault_; }
  bool is_diverge() const { return !fault_ && states_.empty(); }

  /// The state set; meaningless while is_fault().
  const Predicate& states() const { return states_; }
  Predicate& mutable_states() { return states_; }

  bool leq(const Outcome& other) const;

  friend bool operator==(const Outcome& a, const Outcome& b) {
    if (a.fault_ != b.fault_) return false;
    if (a.fault_) return a.states_.algebra().get() == b.states_.algebra().get();
    return a.states_ == b.states_;
  }

 private:
  Predicate states_;
  bool fault_ = false;
};

/// Pointwise lift of composition to state sets: every pair with a defined
/// composition contributes.
Predicate star(const Predicate& a, const Predicate& b);

/// Composition on outcomes: Fault if either side is Fault, the lifted
/// composition of the state sets otherwise.
Outcome star(const Outcome& a, const Outcome& b);
Outcome star(const Predicate& a, const Outcome& b);

/// Greatest lower bound. Fault is the neutral element, so the empty meet is
/// Fault.
Outcome meet(AlgebraPtr algebra, std::span<const Outcome> outcomes);

/// Least upper bound. The empty join is divergence; any Fault absorbs.
Outcome join(AlgebraPtr algebra, std::span<const Outcome> outcomes);

}  // namespace sepalg
