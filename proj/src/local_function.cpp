#include "sepalg/local_function.hpp"

#include <atomic>

#include "sepalg/detail/bits.hpp"

namespace sepalg {

namespace {

std::atomic<VerifyMode> g_verify_mode{VerifyMode::debug_only};

bool should_verify() {
  switch (g_verify_mode.load()) {
    case VerifyMode::off:
      return false;
    case VerifyMode::always:
      return true;
    case VerifyMode::debug_only:
#ifdef NDEBUG
      return false;
#else
      return true;
#endif
  }
  return false;
}

void check_action_shape(const RawAction& action) {
  if (!action.algebra) throw AlgebraError("action has no algebra");
  if (action.outcomes.size() != action.algebra->size())
    throw AlgebraError("action must assign an outcome to every element");
  for (const Outcome& o : action.outcomes)
    if (o.algebra().get() != action.algebra.get())
      throw AlgebraError("action outcome belongs to a different algebra");
}

[[noreturn]] void throw_non_local(const SeparationAlgebra& alg, std::string name,
                                  LocalityVerdict verdict, AlgebraPtr keepalive) {
  const LocalityCounterexample& c = *verdict.counterexample;
  std::string msg = name + " is not local: at frame " + alg.label(c.frame) + " and state " +
                    alg.label(c.state) + ", ";
  if (c.lhs_fault)
    msg += "the framed application faults while the unframed one does not";
  else
    msg += "the framed application reaches " + alg.label(*c.offending) +
           ", which framing the unframed outcome cannot";
  throw NonLocalError(std::move(msg), std::move(name), std::move(verdict.counterexample),
                      std::move(keepalive));
}

}  // namespace

VerifyMode combinator_verification() { return g_verify_mode.load(); }
void set_combinator_verification(VerifyMode mode) { g_verify_mode.store(mode); }

LocalityVerdict check_locality(const RawAction& action) {
  check_action_shape(action);
  const SeparationAlgebra& alg = *action.algebra;
  const std::uint32_t n = static_cast<std::uint32_t>(alg.size());
  for (std::uint32_t frame = 0; frame < n; ++frame) {
    for (std::uint32_t state = 0; state < n; ++state) {
      const std::uint32_t framed = alg.compose_raw(frame, state);
      if (framed == kNoElement) continue;
      const Outcome& lhs = action.outcomes[framed];
      const Outcome& base = action.outcomes[state];
      if (base.is_fault()) continue;  // right side is Fault, the top
      if (lhs.is_fault()) {
        return LocalityVerdict{
            false, LocalityCounterexample{alg.element(frame), alg.element(state), true, {}}};
      }
      const Predicate rhs = star(Predicate::single(alg.element(frame)), base.states());
      const std::uint32_t extra = detail::first_diff_bit(lhs.states().words(), rhs.words());
      if (extra != kNoElement) {
        return LocalityVerdict{false,
                               LocalityCounterexample{alg.element(frame), alg.element(state),
                                                      false, alg.element(extra)}};
      }
    }
  }
  return LocalityVerdict{true, {}};
}

LocalFunction LocalFunction::seal(RawAction action) {
  check_action_shape(action);
  LocalityVerdict verdict = check_locality(action);
  if (!verdict.local)
    throw_non_local(*action.algebra, action.name, std::move(verdict), action.algebra);
  return LocalFunction(std::move(action.algebra), std::move(action.outcomes),
                       std::move(action.name));
}

const Outcome& LocalFunction::apply(ElementId e) const {
  algebra_->require(e);
  return outcomes_[e.index];
}

namespace detail {

LocalFunction make_trusted_local_function(AlgebraPtr algebra, std::vector<Outcome> outcomes,
                                          std::string name) {
  if (should_verify()) {
    RawAction probe{algebra, outcomes, name};
    LocalityVerdict verdict = check_locality(probe);
    if (!verdict.local)
      throw_non_local(*algebra, "internal combinator result " + name, std::move(verdict), algebra);
  }
  return LocalFunction(std::move(algebra), std::move(outcomes), std::move(name));
}

}  // namespace detail

LocalFunction skip(AlgebraPtr algebra) {
  std::vector<Outcome> outcomes;
  const std::size_t n = algebra->size();
  outcomes.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
    outcomes.push_back(Outcome::single(algebra->element(i)));
  return detail::make_trusted_local_function(std::move(algebra), std::move(outcomes), "skip");
}

Outcome apply_lifted(const LocalFunction& f, const Predicate& states) {
  if (f.algebra().get() != states.algebra().get())
    throw AlgebraError("function and states belong to different algebras");
  Outcome acc = Outcome::diverge(f.algebra());
  bool fault = false;
  states.for_each_index([&](std::uint32_t i) {
    const Outcome& o = f.apply_index(i);
    if (o.is_fault())
      fault = true;
    else
      acc.mutable_states() |= o.states();
  });
  if (fault) return Outcome::fault(f.algebra());
  return acc;
}

Outcome apply_lifted(const LocalFunction& f, const Outcome& outcome) {
  if (outcome.is_fault()) return Outcome::fault(f.algebra());
  return apply_lifted(f, outcome.states());
}

LocalFunction seq(const LocalFunction& f, const LocalFunction& g) {
  if (f.algebra().get() != g.algebra().get())
    throw AlgebraError("functions belong to different algebras");
  std::vector<Outcome> outcomes;
  outcomes.reserve(f.size());
  for (std::uint32_t i = 0; i < f.size(); ++i)
    outcomes.push_back(apply_lifted(g, f.apply_index(i)));
  return detail::make_trusted_local_function(f.algebra(), std::move(outcomes),
                                             "(" + f.name() + " ; " + g.name() + ")");
}

LocalFunction choice(const LocalFunction& f, const LocalFunction& g) {
  if (f.algebra().get() != g.algebra().get())
    throw AlgebraError("functions belong to different algebras");
  std::vector<Outcome> outcomes;
  outcomes.reserve(f.size());
  for (std::uint32_t i = 0; i < f.size(); ++i) {
    const Outcome& a = f.apply_index(i);
    const Outcome& b = g.apply_index(i);
    if (a.is_fault() || b.is_fault()) {
      outcomes.push_back(Outcome::fault(f.algebra()));
    } else {
      Outcome merged = a;
      merged.mutable_states() |= b.states();
      outcomes.push_back(std::move(merged));
    }
  }
  return detail::make_trusted_local_function(f.algebra(), std::move(outcomes),
                                             "(" + f.name() + " + " + g.name() + ")");
}

LocalFunction kstar(const LocalFunction& f) {
  const std::size_t n = f.size();
  // Ascending chain of joins of iterates; each non-fixpoint step strictly
  // enlarges some outcome, and each outcome can grow at most n + 2 times,
  // so the loop terminates well within the guard.
  LocalFunction base = skip(f.algebra());
  std::vector<Outcome> current(base.outcomes().begin(), base.outcomes().end());
  const std::size_t guard = n * (n + 2) + 2;
  for (std::size_t step = 0; step < guard; ++step) {
    LocalFunction h = detail::make_trusted_local_function(f.algebra(), current, "star-iterate");
    std::vector<Outcome> next;
    next.reserve(n);
    bool changed = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      Outcome stepped = apply_lifted(h, f.apply_index(i));
      if (stepped.is_fault()) {
        next.push_back(std::move(stepped));
      } else {
        stepped.mutable_states().insert_index(i);  // the skip branch
        next.push_back(std::move(stepped));
      }
      if (!(next.back() == current[i])) changed = true;
    }
    if (!changed)
      return detail::make_trusted_local_function(f.algebra(), std::move(current),
                                                 "(" + f.name() + ")*");
    current = std::move(next);
  }
  throw std::logic_error("iteration failed to reach a fixpoint");
}

Outcome local_limit(const LocalFunction& f, ElementId state) {
  f.algebra()->require(state);
  const SeparationAlgebra& alg = *f.algebra();
  Outcome acc = Outcome::fault(f.algebra());
  bool seeded = false;
  for (const auto& [sub, delta] : alg.decompositions(state.index)) {
    if (sub == state.index) continue;
    Outcome term = star(Predicate::single(alg.element(delta)), f.apply_index(sub));
    if (term.is_fault()) continue;
    if (!seeded) {
      acc = std::move(term);
      seeded = true;
    } else {
      acc.mutable_states() &= term.states();
    }
  }
  return acc;
}

Outcome local_limit_by(const Predicate& from, const LocalFunction& f, ElementId state) {
  if (from.algebra().get() != f.algebra().get())
    throw AlgebraError("function and states belong to different algebras");
  f.algebra()->require(state);
  const SeparationAlgebra& alg = *f.algebra();
  const Outcome& at_state = f.apply_index(state.index);
  // f is local, so every term {delta} * f(sub) dominates f(state); the term
  // at sub = state equals f(state) exactly, and once the running meet hits
  // f(state) no later term can lower it.
  if (from.contains_index(state.index)) return at_state;
  Outcome acc = Outcome::fault(f.algebra());
  bool seeded = false;
  for (const auto& [sub, delta] : alg.decompositions(state.index)) {
    if (!from.contains_index(sub)) continue;
    Outcome term = star(Predicate::single(alg.element(delta)), f.apply_index(sub));
    if (term.is_fault()) continue;
    if (!seeded) {
      acc = std::move(term);
      seeded = true;
    } else {
      acc.mutable_states() &= term.states();
    }
    if (acc == at_state) break;
  }
  return acc;
}

Predicate footprints(const LocalFunction& f) {
  const SeparationAlgebra& alg = *f.algebra();
  Predicate out(f.algebra());
  for (std::uint32_t i = 0; i < alg.size(); ++i) {
    const Outcome limit = local_limit(f, alg.element(i));
    const Outcome& value = f.apply_index(i);
    if (value.leq(limit) && !(value == limit)) out.insert_index(i);
  }
  return out;
}

Predicate safe_states(const LocalFunction& f) {
  Predicate out(f.algebra());
  for (std::uint32_t i = 0; i < f.size(); ++i)
    if (!f.apply_index(i).is_fault()) out.insert_index(i);
  return out;
}

Predicate min_safe_states(const LocalFunction& f) {
  const SeparationAlgebra& alg = *f.algebra();
  const Predicate safe = safe_states(f);
  Predicate out(f.algebra());
  safe.for_each_index([&](std::uint32_t i) {
    for (const auto& [sub, delta] : alg.decompositions(i))
      if (sub != i && safe.contains_index(sub)) return;
    out.insert_index(i);
  });
  return out;
}

DetConstVerdict determinism_constancy(const LocalFunction& f) {
  const SeparationAlgebra& alg = *f.algebra();
  const std::uint32_t n = static_cast<std::uint32_t>(alg.size());
  const std::size_t words = alg.set_words();
  std::vector<std::uint64_t> reachable_frames(words);
  for (std::uint32_t state = 0; state < n; ++state) {
    const Outcome& value = f.apply_index(state);
    if (value.is_fault()) continue;
    // Frames compatible with some result state: for these the right side
    // is nonempty, so an incompatible frame (left side diverges) violates.
    std::fill(reachable_frames.begin(), reachable_frames.end(), 0);
    value.states().for_each_index([&](std::uint32_t t) {
      const auto row = alg.compatible_row(t);
      for (std::size_t w = 0; w < words; ++w) reachable_frames[w] |= row[w];
    });
    const auto state_row = alg.compatible_row(state);
    std::uint32_t bad_frame = kNoElement;
    for (std::size_t w = 0; w < words && bad_frame == kNoElement; ++w) {
      const std::uint64_t undefined_violation = reachable_frames[w] & ~state_row[w];
      if (undefined_violation)
        bad_frame = static_cast<std::uint32_t>(w * 64 + std::countr_zero(undefined_violation));
    }
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = state_row[w];
      while (bits) {
        const std::uint32_t frame = static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
        if (frame >= bad_frame) break;
        const Outcome& lhs = f.apply_index(alg.compose_raw(frame, state));
        const Outcome rhs = star(Predicate::single(alg.element(frame)), value);
        if (!(lhs == rhs)) {
          bad_frame = frame;
          break;
        }
      }
      if (bad_frame != kNoElement && bad_frame / 64 <= w) break;
    }
    if (bad_frame != kNoElement) {
      const std::uint32_t framed = alg.compose_raw(bad_frame, state);
      Outcome lhs = framed == kNoElement ? Outcome::diverge(f.algebra()) : f.apply_index(framed);
      Outcome rhs = star(Predicate::single(alg.element(bad_frame)), value);
      return DetConstVerdict{false, DetConstCounterexample{alg.element(bad_frame),
                                                           alg.element(state), std::move(lhs),
                                                           std::move(rhs)}};
    }
  }
  return DetConstVerdict{true, {}};
}

}  // namespace sepalg
