#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sepalg {

class SeparationAlgebra;
class Predicate;

using AlgebraPtr = std::shared_ptr<const SeparationAlgebra>;

/// Default cap on carrier size. Analyses scan all decompositions of all
/// elements, so cost grows quadratically; the cap keeps accidental blowups
/// from hanging a session. Overridable everywhere it applies.
inline constexpr std::size_t kDefaultMaxElements = 4096;

inline constexpr std::uint32_t kNoElement = 0xffffffffu;

/// Handle into one algebra's carrier. A handle is only meaningful for the
/// algebra that issued it; every operation rejects foreign handles. The
/// total order on handles is the carrier construction order, and every
/// set-valued result iterates in that order.
struct ElementId {
  const SeparationAlgebra* algebra = nullptr;
  std::uint32_t index = 0;

  friend bool operator==(const ElementId&, const ElementId&) = default;
  friend auto operator<=>(const ElementId&, const ElementId&) = default;
};

class AlgebraError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// subtract(whole, part) requires part to be a substate of whole.
class NotSubstateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One law violation found while validating a composition table. The
/// witness is a tuple of element labels; replay_violation() reproduces the
/// failure from the raw table.
struct LawViolation {
  std::string law;
  std::vector<std::string> witness;
};

struct ValidationReport {
  bool passed = false;
  bool size_guard_exceeded = false;
  bool truncated = false;  // violation list capped
  std::vector<LawViolation> violations;
};

/// Unvalidated composition table: the carrier as labels, the unit label,
/// and the defined compositions as (a, b, a*b) rows. Absent pairs are
/// undefined compositions. No symmetry or totality is assumed; validation
/// checks the actual contents.
struct RawTable {
  std::vector<std::string> elements;
  std::string unit;
  std::vector<std::array<std::string, 3>> compose;
  std::string origin;
};

/// A finite separation algebra: a cancellative partial commutative monoid.
/// Instances are produced only by validate() and are immutable afterwards,
/// so every consumer can rely on the laws holding.
class SeparationAlgebra : public std::enable_shared_from_this<SeparationAlgebra> {
 public:
  struct BuildResult {
    ValidationReport report;
    AlgebraPtr algebra;  // null unless report.passed
  };

  /// Checks commutativity, associativity (as partial equality: both sides
  /// undefined or both defined and equal), the unit law, and cancellativity.
  /// Structural problems (duplicate labels, unknown unit, labels missing
  /// from the carrier, conflicting rows) are reported the same way; nothing
  /// throws except the allocator.
  static BuildResult validate(const RawTable& table,
                              std::size_t max_elements = kDefaultMaxElements);

  std::size_t size() const { return labels_.size(); }
  ElementId unit() const { return element(unit_); }
  std::uint32_t unit_index() const { return unit_; }
  ElementId element(std::uint32_t index) const;
  std::optional<ElementId> find(std::string_view label) const;
  const std::string& label(ElementId e) const;
  const std::string& label_at(std::uint32_t index) const { return labels_[index]; }
  const std::string& origin() const { return origin_; }

  std::optional<ElementId> compose(ElementId a, ElementId b) const;
  std::uint32_t compose_raw(std::uint32_t a, std::uint32_t b) const {
    return table_[a * labels_.size() + b];
  }

  /// a # b: the composition a*b is defined.
  bool separate(ElementId a, ElementId b) const;

  /// part <= whole in the derived order: some delta satisfies part*delta = whole.
  bool is_substate(ElementId part, ElementId whole) const;
  bool is_strict_substate(ElementId part, ElementId whole) const;

  /// The unique delta with delta*part = whole (unique by cancellativity).
  ElementId subtract(ElementId whole, ElementId part) const;

  Predicate substates(ElementId e) const;

  /// All ordered decompositions of an element: pairs (sub, delta) with
  /// sub*delta = element, ascending by sub. Each sub appears exactly once.
  std::span<const std::pair<std::uint32_t, std::uint32_t>> decompositions(std::uint32_t index) const {
    const auto& d = decomps_[index];
    return {d.data(), d.size()};
  }

  /// Bit row over the carrier: which elements compose with this one.
  std::span<const std::uint64_t> compatible_row(std::uint32_t index) const {
    return {compat_.data() + index * words_, words_};
  }

  std::size_t set_words() const { return words_; }

  void require(ElementId e) const;

 private:
  SeparationAlgebra() = default;

  std::vector<std::string> labels_;
  std::uint32_t unit_ = 0;
  std::vector<std::uint32_t> table_;  // n*n, kNoElement marks undefined
  std::string origin_;
  std::size_t words_ = 0;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> decomps_;
  std::vector<std::uint64_t> compat_;
};

/// Re-runs one reported violation against the raw table; true when the
/// violation is reproduced.
bool replay_violation(const RawTable& table, const LawViolation& violation);

/// First pair (a, b) with a != unit and a*b = unit, scanning in handle
/// order; such a pair exists exactly when the algebra is not well-founded.
std::optional<std::pair<ElementId, ElementId>> negativity_witness(const SeparationAlgebra& algebra);

struct WellFoundedness {
  bool well_founded = false;
  /// On failure: elements c0, c1, ..., ck with c0 < c1 < ... < ck < c0 in
  /// the strict substate order.
  std::vector<ElementId> cycle;
};

WellFoundedness check_well_founded(const SeparationAlgebra& algebra);

/// Finite subset of one algebra's carrier.
class Predicate {
 public:
  explicit Predicate(AlgebraPtr algebra);
  static Predicate full(AlgebraPtr algebra);
  static Predicate single(ElementId e);

  const AlgebraPtr& algebra() const { return algebra_; }

  void insert(ElementId e);
  void erase(ElementId e);
  bool contains(ElementId e) const;
  void insert_index(std::uint32_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase_index(std::uint32_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool contains_index(std::uint32_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1;
  }

  bool empty() const;
  std::size_t count() const;
  std::vector<ElementId> elements() const;
  std::optional<ElementId> first() const;

  Predicate& operator&=(const Predicate& other);
  Predicate& operator|=(const Predicate& other);
  Predicate& operator-=(const Predicate& other);
  bool subset_of(const Predicate& other) const;

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.algebra_.get() == b.algebra_.get() && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const Predicate& a, const Predicate& b);

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }

  template <typename Fn>
  void for_each_index(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t bits = words_[i];
      while (bits) {
        fn(static_cast<std::uint32_t>(i * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

 private:
  void check_same(const Predicate& other) const;

  AlgebraPtr algebra_;
  std::vector<std::uint64_t> words_;
};

struct PrecisionVerdict {
  bool precise = false;
  /// On failure: a state with two distinct substates in the predicate,
  /// as (state, first, second).
  std::optional<std::array<ElementId, 3>> witness;
};

PrecisionVerdict check_precise(const Predicate& p);

}  // namespace sepalg
