#include "sepalg/outcome.hpp"

#include "sepalg/detail/bits.hpp"

namespace sepalg {

bool Outcome::leq(const Outcome& other) const {
  if (states_.algebra().get() != other.states_.algebra().get())
    throw AlgebraError("outcomes belong to different algebras");
  if (other.fault_) return true;
  if (fault_) return false;
  return states_.subset_of(other.states_);
}

Predicate star(const Predicate& a, const Predicate& b) {
  if (a.algebra().get() != b.algebra().get())
    throw AlgebraError("predicates belong to different algebras");
  const SeparationAlgebra& alg = *a.algebra();
  Predicate out(a.algebra());
  a.for_each_index([&](std::uint32_t i) {
    b.for_each_index([&](std::uint32_t j) {
      const std::uint32_t c = alg.compose_raw(i, j);
      if (c != kNoElement) out.insert_index(c);
    });
  });
  return out;
}

Outcome star(const Outcome& a, const Outcome& b) {
  if (a.algebra().get() != b.algebra().get())
    throw AlgebraError("outcomes belong to different algebras");
  if (a.is_fault() || b.is_fault()) return Outcome::fault(a.algebra());
  return Outcome(star(a.states(), b.states()));
}

Outcome star(const Predicate& a, const Outcome& b) {
  if (a.algebra().get() != b.algebra().get())
    throw AlgebraError("operands belong to different algebras");
  if (b.is_fault()) return Outcome::fault(a.algebra());
  return Outcome(star(a, b.states()));
}

Outcome meet(AlgebraPtr algebra, std::span<const Outcome> outcomes) {
  Outcome acc = Outcome::fault(algebra);
  bool all_fault = true;
  for (const Outcome& o : outcomes) {
    if (o.algebra().get() != algebra.get())
      throw AlgebraError("outcomes belong to different algebras");
    if (o.is_fault()) continue;
    if (all_fault) {
      acc = o;
      all_fault = false;
    } else {
      acc.mutable_states() &= o.states();
    }
  }
  return acc;
}

Outcome join(AlgebraPtr algebra, std::span<const Outcome> outcomes) {
  Outcome acc = Outcome::diverge(algebra);
  for (const Outcome& o : outcomes) {
    if (o.algebra().get() != algebra.get())
      throw AlgebraError("outcomes belong to different algebras");
    if (o.is_fault()) return Outcome::fault(std::move(algebra));
    acc.mutable_states() |= o.states();
  }
  return acc;
}

}  // namespace sepalg
