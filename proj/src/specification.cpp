#include "sepalg/specification.hpp"

#include <algorithm>

namespace sepalg {

Specification::Specification(AlgebraPtr algebra) : algebra_(std::move(algebra)) {
  if (!algebra_) throw AlgebraError("specification requires an algebra");
}

void Specification::add(Statement s) {
  if (s.pre.algebra().get() != algebra_.get() || s.post.algebra().get() != algebra_.get())
    throw AlgebraError("statement belongs to a different algebra");
  auto it = std::lower_bound(statements_.begin(), statements_.end(), s);
  if (it != statements_.end() && *it == s) return;
  statements_.insert(it, std::move(s));
}

Predicate Specification::domain() const {
  Predicate d(algebra_);
  for (const Statement& s : statements_) d |= s.pre;
  return d;
}

bool satisfies(const LocalFunction& f, const Statement& s) {
  if (f.algebra().get() != s.pre.algebra().get())
    throw AlgebraError("function and statement belong to different algebras");
  bool ok = true;
  s.pre.for_each_index([&](std::uint32_t i) {
    const Outcome& o = f.apply_index(i);
    if (o.is_fault() || !o.states().subset_of(s.post)) ok = false;
  });
  return ok;
}

bool satisfies_spec(const LocalFunction& f, const Specification& spec) {
  for (const Statement& s : spec.statements())
    if (!satisfies(f, s)) return false;
  return true;
}

LocalFunction bla(const Specification& spec) {
  const SeparationAlgebra& alg = *spec.algebra();
  const std::uint32_t n = static_cast<std::uint32_t>(alg.size());
  std::vector<Outcome> outcomes;
  outcomes.reserve(n);
  for (std::uint32_t state = 0; state < n; ++state) {
    Outcome acc = Outcome::fault(spec.algebra());
    bool seeded = false;
    for (const auto& [sub, delta] : alg.decompositions(state)) {
      const Predicate frame = Predicate::single(alg.element(delta));
      for (const Statement& s : spec.statements()) {
        if (!s.pre.contains_index(sub)) continue;
        Predicate term = star(frame, s.post);
        if (!seeded) {
          acc = Outcome(std::move(term));
          seeded = true;
        } else {
          acc.mutable_states() &= term;
        }
      }
    }
    outcomes.push_back(std::move(acc));
  }
  return detail::make_trusted_local_function(spec.algebra(), std::move(outcomes), "bla");
}

bool entails(const Specification& spec, const Statement& s) {
  return satisfies(bla(spec), s);
}

bool entails_spec(const Specification& spec, const Specification& target) {
  return satisfies_spec(bla(spec), target);
}

CompletenessVerdict is_complete(const Specification& spec, const LocalFunction& f) {
  if (spec.algebra().get() != f.algebra().get())
    throw AlgebraError("specification and function belong to different algebras");
  const LocalFunction best = bla(spec);
  for (std::uint32_t i = 0; i < f.size(); ++i)
    if (!(best.apply_index(i) == f.apply_index(i)))
      return CompletenessVerdict{false, f.algebra()->element(i)};
  return CompletenessVerdict{true, {}};
}

Specification canonicalise(const Specification& spec) {
  const LocalFunction best = bla(spec);
  Specification out(spec.algebra());
  spec.domain().for_each_index([&](std::uint32_t i) {
    // Domain states never fault under bla: the trivial decomposition
    // contributes the statement's own postcondition to the meet.
    out.add(Statement{Predicate::single(spec.algebra()->element(i)),
                      best.apply_index(i).states()});
  });
  return out;
}

Specification big_spec(const LocalFunction& f) {
  Specification out(f.algebra());
  for (std::uint32_t i = 0; i < f.size(); ++i) {
    const Outcome& o = f.apply_index(i);
    if (o.is_fault()) continue;
    out.add(Statement{Predicate::single(f.algebra()->element(i)), o.states()});
  }
  return out;
}

BasisVerdict is_basis(const Predicate& from, const LocalFunction& f) {
  for (std::uint32_t i = 0; i < f.size(); ++i) {
    const ElementId state = f.algebra()->element(i);
    if (!(local_limit_by(from, f, state) == f.apply_index(i)))
      return BasisVerdict{false, state};
  }
  return BasisVerdict{true, {}};
}

SmallSpecResult small_spec(const LocalFunction& f) {
  const Predicate fp = footprints(f);
  const BasisVerdict verdict = is_basis(fp, f);
  if (!verdict.basis) return SmallSpecResult{std::nullopt, verdict.witness};
  Specification out(f.algebra());
  fp.for_each_index([&](std::uint32_t i) {
    const Outcome& o = f.apply_index(i);
    if (o.is_fault()) return;
    out.add(Statement{Predicate::single(f.algebra()->element(i)), o.states()});
  });
  return SmallSpecResult{std::move(out), std::nullopt};
}

}  // namespace sepalg
