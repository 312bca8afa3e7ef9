#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace sepalg;
using namespace sepalg::testing;

namespace {

RawTable sign_flip_pair() {
  RawTable t;
  t.elements = {"u", "a"};
  t.unit = "u";
  t.compose = {{"u", "u", "u"}, {"u", "a", "a"}, {"a", "u", "a"}, {"a", "a", "u"}};
  t.origin = "pair";
  return t;
}

bool has_violation(const ValidationReport& report, const std::string& law) {
  for (const LawViolation& v : report.violations)
    if (v.law == law) return true;
  return false;
}

/// Every reported witness must replay against the source table.
void check_replay(const RawTable& table, const ValidationReport& report) {
  REQUIRE(!report.violations.empty());
  for (const LawViolation& v : report.violations) CHECK(replay_violation(table, v));
}

}  // namespace

TEST_CASE("valid tables build and report no violations") {
  const auto result = SeparationAlgebra::validate(sign_flip_pair());
  REQUIRE(result.report.passed);
  CHECK(result.report.violations.empty());
  REQUIRE(result.algebra != nullptr);
  CHECK(result.algebra->size() == 2);
  CHECK(result.algebra->label_at(result.algebra->unit_index()) == "u");
}

TEST_CASE("passed is equivalent to an empty violation list") {
  auto good = SeparationAlgebra::validate(sign_flip_pair());
  CHECK(good.report.passed == good.report.violations.empty());

  RawTable bad = sign_flip_pair();
  bad.compose.erase(bad.compose.begin() + 2);  // drop a*u, leaving u*a without its mirror
  auto result = SeparationAlgebra::validate(bad);
  CHECK_FALSE(result.report.passed);
  CHECK(result.report.passed == result.report.violations.empty());
}

TEST_CASE("duplicate labels are rejected and replayed") {
  RawTable t = sign_flip_pair();
  t.elements.push_back("a");
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "duplicate_label"));
  check_replay(t, result.report);
}

TEST_CASE("unknown unit is rejected") {
  RawTable t = sign_flip_pair();
  t.unit = "zero";
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "unknown_unit"));
  check_replay(t, result.report);
}

TEST_CASE("rows naming unknown elements are rejected") {
  RawTable t = sign_flip_pair();
  t.compose.push_back({"a", "b", "u"});
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "unknown_label"));
  check_replay(t, result.report);
}

TEST_CASE("conflicting rows are rejected") {
  RawTable t = sign_flip_pair();
  t.compose.push_back({"a", "a", "a"});
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "conflicting_entry"));
  check_replay(t, result.report);
}

TEST_CASE("unit law violations are caught") {
  RawTable t;
  t.elements = {"u", "a"};
  t.unit = "u";
  t.compose = {{"u", "u", "u"}, {"u", "a", "u"}, {"a", "u", "u"}};
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "unit"));
  check_replay(t, result.report);
}

TEST_CASE("commutativity violations are caught") {
  RawTable t;
  t.elements = {"u", "a", "b"};
  t.unit = "u";
  t.compose = {{"u", "u", "u"}, {"u", "a", "a"}, {"u", "b", "b"},
               {"a", "u", "a"}, {"b", "u", "b"}, {"a", "b", "a"}};
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "commutativity"));
  check_replay(t, result.report);
}

TEST_CASE("associativity violations are caught in both modes") {
  // (a*a)*a defined but a*(a*a) undefined
  RawTable t;
  t.elements = {"u", "a", "b"};
  t.unit = "u";
  t.compose = {{"u", "u", "u"}, {"u", "a", "a"}, {"u", "b", "b"}, {"a", "u", "a"},
               {"b", "u", "b"}, {"a", "a", "b"}, {"b", "a", "u"}, {"a", "b", "u"}};
  // a*a=b, b*a=u: (a*a)*a = b*a = u, a*(a*a) = a*b = u; fine so far.
  // b*b undefined: (a*a)*b = b*b undefined, a*(a*b) = a*u = a defined.
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "associativity"));
  check_replay(t, result.report);
}

TEST_CASE("cancellativity violations are caught") {
  // a*b = a*u = a makes composition with a non-injective
  RawTable t;
  t.elements = {"u", "a", "b"};
  t.unit = "u";
  t.compose = {{"u", "u", "u"}, {"u", "a", "a"}, {"u", "b", "b"}, {"a", "u", "a"},
               {"b", "u", "b"}, {"a", "b", "a"}, {"b", "a", "a"}};
  const auto result = SeparationAlgebra::validate(t);
  REQUIRE_FALSE(result.report.passed);
  CHECK(has_violation(result.report, "cancellativity"));
  check_replay(t, result.report);
}

TEST_CASE("size guard rejects oversized carriers") {
  RawTable t = sign_flip_pair();
  const auto result = SeparationAlgebra::validate(t, 1);
  REQUIRE_FALSE(result.report.passed);
  CHECK(result.report.size_guard_exceeded);
}

TEST_CASE("compose and separate agree with the table") {
  const BuiltModel& m = ph2();
  const SeparationAlgebra& alg = *m.algebra;
  const ElementId u = alg.unit();
  const ElementId c1 = el(m, "1->7");
  const ElementId c2 = el(m, "2->7");
  const ElementId both = el(m, "1->7 * 2->7");

  CHECK(alg.compose(c1, c2) == both);
  CHECK(alg.compose(c2, c1) == both);
  CHECK(alg.compose(u, c1) == c1);
  CHECK_FALSE(alg.compose(c1, c1).has_value());
  CHECK(alg.separate(c1, c2));
  CHECK_FALSE(alg.separate(c1, both));
  CHECK(alg.separate(u, both));
}

TEST_CASE("substate order and subtraction") {
  const BuiltModel& m = ph2();
  const SeparationAlgebra& alg = *m.algebra;
  const ElementId u = alg.unit();
  const ElementId c1 = el(m, "1->7");
  const ElementId c2 = el(m, "2->7");
  const ElementId both = el(m, "1->7 * 2->7");

  CHECK(alg.is_substate(c1, both));
  CHECK(alg.is_substate(both, both));
  CHECK_FALSE(alg.is_strict_substate(both, both));
  CHECK(alg.is_strict_substate(u, both));
  CHECK_FALSE(alg.is_substate(both, c1));

  CHECK(alg.subtract(both, c1) == c2);
  CHECK(alg.subtract(both, u) == both);
  CHECK(alg.subtract(c1, c1) == u);
  CHECK_THROWS_AS((void)alg.subtract(c1, c2), NotSubstateError);

  const Predicate subs = alg.substates(both);
  CHECK(subs == pred(m, {"u", "1->7", "2->7", "1->7 * 2->7"}));
}

TEST_CASE("decompositions are complete, sorted, and unique") {
  const BuiltModel& m = h1_tiny();
  const SeparationAlgebra& alg = *m.algebra;
  for (std::uint32_t i = 0; i < alg.size(); ++i) {
    const auto decomps = alg.decompositions(i);
    std::uint32_t prev = kNoElement;
    for (const auto& [sub, delta] : decomps) {
      CHECK(alg.compose_raw(sub, delta) == i);
      if (prev != kNoElement) CHECK(prev < sub);
      prev = sub;
    }
    // every substate appears exactly once
    std::size_t count = 0;
    for (std::uint32_t s = 0; s < alg.size(); ++s)
      if (alg.is_substate(alg.element(s), alg.element(i))) ++count;
    CHECK(count == decomps.size());
  }
}

TEST_CASE("negativity witnesses") {
  CHECK_FALSE(negativity_witness(*ph2().algebra).has_value());
  CHECK_FALSE(negativity_witness(*h1_tiny().algebra).has_value());
  CHECK_FALSE(negativity_witness(*h2_tiny().algebra).has_value());

  const auto z3w = negativity_witness(*z3().algebra);
  REQUIRE(z3w.has_value());
  CHECK(z3().algebra->label(z3w->first) == "1");
  CHECK(z3().algebra->label(z3w->second) == "2");

  const auto pair = SeparationAlgebra::validate(sign_flip_pair()).algebra;
  const auto pw = negativity_witness(*pair);
  REQUIRE(pw.has_value());
  CHECK(pair->label(pw->first) == "a");
  CHECK(pair->label(pw->second) == "a");
}

TEST_CASE("well-foundedness and cycles") {
  CHECK(check_well_founded(*ph2().algebra).well_founded);
  CHECK(check_well_founded(*h1_tiny().algebra).well_founded);
  CHECK(check_well_founded(*h2_tiny().algebra).well_founded);

  const auto wf = check_well_founded(*z3().algebra);
  REQUIRE_FALSE(wf.well_founded);
  REQUIRE(wf.cycle.size() >= 2);
  // consecutive entries strictly descend-then-return in the substate order
  const SeparationAlgebra& alg = *z3().algebra;
  for (std::size_t i = 0; i + 1 < wf.cycle.size(); ++i)
    CHECK(alg.is_strict_substate(wf.cycle[i], wf.cycle[i + 1]));
  CHECK(alg.is_strict_substate(wf.cycle.back(), wf.cycle.front()));
}

TEST_CASE("predicate operations") {
  const BuiltModel& m = ph2();
  Predicate p(m.algebra);
  CHECK(p.empty());
  p.insert(el(m, "1->7"));
  CHECK(p.count() == 1);
  CHECK(p.contains(el(m, "1->7")));

  Predicate q = Predicate::full(m.algebra);
  CHECK(q.count() == 4);
  q -= p;
  CHECK(q.count() == 3);
  CHECK_FALSE(q.contains(el(m, "1->7")));

  Predicate r = pred(m, {"1->7", "2->7"});
  CHECK(p.subset_of(r));
  CHECK_FALSE(r.subset_of(p));
  r &= p;
  CHECK(r == p);
  r |= pred(m, {"u"});
  CHECK(r == pred(m, {"u", "1->7"}));

  const Predicate single = Predicate::single(el(m, "2->7"));
  CHECK(single.count() == 1);
  CHECK(*single.first() == el(m, "2->7"));
}

TEST_CASE("precision verdicts and witnesses") {
  const BuiltModel& m = ph2();

  CHECK(check_precise(Predicate(m.algebra)).precise);
  CHECK(check_precise(pred(m, {"1->7"})).precise);
  CHECK(check_precise(pred(m, {"1->7 * 2->7"})).precise);

  // u below everything makes {u, 1->7} ambiguous at 1->7
  const auto v1 = check_precise(pred(m, {"u", "1->7"}));
  REQUIRE_FALSE(v1.precise);
  REQUIRE(v1.witness.has_value());
  const auto& [state, first, second] = *v1.witness;
  const SeparationAlgebra& alg = *m.algebra;
  CHECK(alg.is_substate(first, state));
  CHECK(alg.is_substate(second, state));
  CHECK(first != second);

  // two disjoint cells are both inside their composition
  const auto v2 = check_precise(pred(m, {"1->7", "2->7"}));
  CHECK_FALSE(v2.precise);

  // full carrier of any nontrivial algebra is imprecise
  CHECK_FALSE(check_precise(Predicate::full(m.algebra)).precise);
}

TEST_CASE("element lookup and require") {
  const BuiltModel& m = ph2();
  const SeparationAlgebra& alg = *m.algebra;
  CHECK(alg.find("1->7").has_value());
  CHECK_FALSE(alg.find("3->7").has_value());
  CHECK(alg.element(0) == alg.unit());
  CHECK_THROWS_AS((void)alg.element(99), AlgebraError);
}
