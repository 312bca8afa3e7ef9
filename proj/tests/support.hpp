#pragma once

#include <random>

#include "sepalg/job.hpp"

namespace sepalg::testing {

/// Deterministic generator; modulo draw keeps sequences identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(std::uint32_t percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

// Shared fixtures, built once per process; everything reachable is const.
const BuiltModel& ph2();      // plain heap, L={1,2}, Val={7}
const BuiltModel& h1_tiny();  // stack heap, L={1,2}, Val={0,1,2}, Var={x,y}
const BuiltModel& h2_tiny();  // free-set heap, same parameters
const BuiltModel& z3();
const BuiltModel& z5();

ElementId el(const BuiltModel& model, std::string_view text);
Predicate pred(const BuiltModel& model, std::initializer_list<const char*> labels);

// Reference implementations with no shortcuts; tests check the optimized
// library paths against these.
Outcome naive_local_limit(const LocalFunction& f, ElementId state);
Outcome naive_local_limit_by(const Predicate& from, const LocalFunction& f, ElementId state);
bool naive_is_basis(const Predicate& from, const LocalFunction& f);
bool naive_is_local(const RawAction& action);
bool naive_det_const(const LocalFunction& f);

Predicate random_predicate(const AlgebraPtr& algebra, Rng& rng, std::uint32_t percent_fill);
Specification random_spec(const BuiltModel& model, Rng& rng);

/// Largest local function of a random specification, then randomized
/// pruning of its images; every removal is locality-rechecked, and the
/// result is sealed with a full check.
LocalFunction random_local_function(const BuiltModel& model, Rng& rng, std::string name);

/// Local function that satisfies `base` and sits at or below bla(base).
LocalFunction satisfying_sample(const BuiltModel& model, const Specification& base, Rng& rng,
                                std::string name);

/// Every primitive command of the model's kind that is a local function.
std::vector<LocalFunction> all_primitives(const BuiltModel& model);

/// all_primitives plus `random_count` random local functions.
std::vector<LocalFunction> battery(const BuiltModel& model, Rng& rng, int random_count);

/// Valid by construction: conclusions of internal nodes are produced by
/// apply_* on their premises and leaves are statements of phi.
Derivation random_valid_derivation(const Specification& phi, const AlgebraPtr& algebra,
                                   Rng& rng);

/// Breaks exactly one rule side condition somewhere in the tree.
Derivation mutate_derivation(const Derivation& valid, const Specification& phi, Rng& rng);

/// Statement entailed by phi: pre drawn from states where bla(phi) is safe,
/// post covering the reachable states plus noise.
std::optional<Statement> random_entailed_statement(const Specification& phi,
                                                   const LocalFunction& bla_phi, Rng& rng);

}  // namespace sepalg::testing
