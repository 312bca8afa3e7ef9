#include "sepalg/algebra.hpp"

#include <algorithm>
#include <unordered_map>

#include "sepalg/detail/bits.hpp"

namespace sepalg {

namespace {

constexpr std::size_t kMaxReportedViolations = 256;

struct ViolationSink {
  ValidationReport& report;
  const std::vector<std::string>& labels;

  void add(const char* law, std::initializer_list<std::uint32_t> indices) {
    if (report.violations.size() >= kMaxReportedViolations) {
      report.truncated = true;
      return;
    }
    LawViolation v;
    v.law = law;
    for (std::uint32_t i : indices) v.witness.push_back(labels[i]);
    report.violations.push_back(std::move(v));
  }

  void add_raw(const char* law, std::initializer_list<std::string_view> witness) {
    if (report.violations.size() >= kMaxReportedViolations) {
      report.truncated = true;
      return;
    }
    LawViolation v;
    v.law = law;
    for (auto w : witness) v.witness.emplace_back(w);
    report.violations.push_back(std::move(v));
  }
};

}  // namespace

SeparationAlgebra::BuildResult SeparationAlgebra::validate(const RawTable& t,
                                                           std::size_t max_elements) {
  BuildResult result;
  ValidationReport& rep = result.report;
  ViolationSink sink{rep, t.elements};
  const std::size_t n = t.elements.size();

  if (n == 0) {
    sink.add_raw("structure", {"empty carrier"});
    return result;
  }
  if (n > max_elements) {
    rep.size_guard_exceeded = true;
    sink.add_raw("size_guard", {std::to_string(n)});
    return result;
  }

  std::unordered_map<std::string_view, std::uint32_t> index;
  index.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto [it, fresh] = index.emplace(t.elements[i], i);
    if (!fresh) sink.add_raw("duplicate_label", {t.elements[i]});
  }
  auto unit_it = index.find(t.unit);
  if (unit_it == index.end()) sink.add_raw("unknown_unit", {t.unit});
  if (!rep.violations.empty()) return result;

  const std::uint32_t u = unit_it->second;
  std::vector<std::uint32_t> table(n * n, kNoElement);
  for (const auto& row : t.compose) {
    auto a = index.find(row[0]);
    auto b = index.find(row[1]);
    auto c = index.find(row[2]);
    if (a == index.end() || b == index.end() || c == index.end()) {
      sink.add_raw("unknown_label", {row[0], row[1], row[2]});
      continue;
    }
    std::uint32_t& cell = table[a->second * n + b->second];
    if (cell != kNoElement && cell != c->second)
      sink.add_raw("conflicting_entry", {row[0], row[1]});
    else
      cell = c->second;
  }
  if (!rep.violations.empty()) return result;

  for (std::uint32_t a = 0; a < n; ++a)
    if (table[u * n + a] != a) sink.add("unit", {a});

  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a; b < n; ++b)
      if (table[a * n + b] != table[b * n + a]) sink.add("commutativity", {a, b});

  // Associativity as partial equality. Scanning every triple directly is
  // cubic in the carrier; instead, for each pair walk either the full row
  // (when a*b is defined) or only the partners of b (when it is not, the
  // left side is undefined for every c, so only a defined right side can
  // disagree).
  std::vector<std::vector<std::uint32_t>> partners(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (table[a * n + b] != kNoElement) partners[a].push_back(b);

  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      const std::uint32_t ab = table[a * n + b];
      if (ab == kNoElement) {
        for (std::uint32_t c : partners[b]) {
          const std::uint32_t bc = table[b * n + c];
          if (table[a * n + bc] != kNoElement) sink.add("associativity", {a, b, c});
        }
      } else {
        for (std::uint32_t c = 0; c < n; ++c) {
          const std::uint32_t bc = table[b * n + c];
          const std::uint32_t lhs = table[ab * n + c];
          const std::uint32_t rhs = bc == kNoElement ? kNoElement : table[a * n + bc];
          if (lhs != rhs) sink.add("associativity", {a, b, c});
        }
      }
    }
  }

  // Cancellativity: for each a the map b -> a*b is injective on its domain.
  std::vector<std::uint32_t> seen(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), kNoElement);
    for (std::uint32_t b = 0; b < n; ++b) {
      const std::uint32_t v = table[a * n + b];
      if (v == kNoElement) continue;
      if (seen[v] != kNoElement)
        sink.add("cancellativity", {a, seen[v], b});
      else
        seen[v] = b;
    }
  }

  if (!rep.violations.empty()) return result;
  rep.passed = true;

  auto alg = std::shared_ptr<SeparationAlgebra>(new SeparationAlgebra());
  alg->labels_ = t.elements;
  alg->unit_ = u;
  alg->table_ = std::move(table);
  alg->origin_ = t.origin;
  alg->words_ = (n + 63) / 64;
  alg->decomps_.resize(n);
  alg->compat_.assign(n * alg->words_, 0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      const std::uint32_t c = alg->table_[a * n + b];
      if (c == kNoElement) continue;
      // Outer loop ascending in a, and b is unique per (c, a) by
      // cancellativity, so each list arrives sorted by sub.
      alg->decomps_[c].emplace_back(a, b);
      alg->compat_[a * alg->words_ + b / 64] |= std::uint64_t{1} << (b % 64);
    }
  }
  result.algebra = std::move(alg);
  return result;
}

ElementId SeparationAlgebra::element(std::uint32_t index) const {
  if (index >= labels_.size()) throw AlgebraError("element index out of range");
  return ElementId{this, index};
}

std::optional<ElementId> SeparationAlgebra::find(std::string_view label) const {
  for (std::uint32_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return ElementId{this, i};
  return std::nullopt;
}

const std::string& SeparationAlgebra::label(ElementId e) const {
  require(e);
  return labels_[e.index];
}

void SeparationAlgebra::require(ElementId e) const {
  if (e.algebra != this) throw AlgebraError("element handle belongs to a different algebra");
  if (e.index >= labels_.size()) throw AlgebraError("element index out of range");
}

std::optional<ElementId> SeparationAlgebra::compose(ElementId a, ElementId b) const {
  require(a);
  require(b);
  const std::uint32_t c = compose_raw(a.index, b.index);
  if (c == kNoElement) return std::nullopt;
  return ElementId{this, c};
}

bool SeparationAlgebra::separate(ElementId a, ElementId b) const {
  require(a);
  require(b);
  return compose_raw(a.index, b.index) != kNoElement;
}

bool SeparationAlgebra::is_substate(ElementId part, ElementId whole) const {
  require(part);
  require(whole);
  const auto d = decompositions(whole.index);
  auto it = std::lower_bound(d.begin(), d.end(), part.index,
                             [](const auto& p, std::uint32_t v) { return p.first < v; });
  return it != d.end() && it->first == part.index;
}

bool SeparationAlgebra::is_strict_substate(ElementId part, ElementId whole) const {
  return part.index != whole.index && is_substate(part, whole);
}

ElementId SeparationAlgebra::subtract(ElementId whole, ElementId part) const {
  require(part);
  require(whole);
  const auto d = decompositions(whole.index);
  auto it = std::lower_bound(d.begin(), d.end(), part.index,
                             [](const auto& p, std::uint32_t v) { return p.first < v; });
  if (it == d.end() || it->first != part.index)
    throw NotSubstateError(labels_[part.index] + " is not a substate of " + labels_[whole.index]);
  return ElementId{this, it->second};
}

Predicate SeparationAlgebra::substates(ElementId e) const {
  require(e);
  Predicate result(shared_from_this());
  for (const auto& [sub, delta] : decompositions(e.index)) result.insert_index(sub);
  return result;
}

namespace {

// Minimal raw-table lookup used to replay violations without validating.
struct RawLookup {
  const RawTable& t;

  bool has_element(std::string_view label) const {
    return std::count(t.elements.begin(), t.elements.end(), label) > 0;
  }

  std::optional<std::string_view> compose(std::string_view a, std::string_view b) const {
    for (const auto& row : t.compose)
      if (row[0] == a && row[1] == b) return std::string_view(row[2]);
    return std::nullopt;
  }
};

}  // namespace

bool replay_violation(const RawTable& table, const LawViolation& v) {
  RawLookup raw{table};
  const auto& w = v.witness;
  if (v.law == "duplicate_label") {
    return w.size() == 1 &&
           std::count(table.elements.begin(), table.elements.end(), w[0]) > 1;
  }
  if (v.law == "unknown_unit") return !raw.has_element(table.unit);
  if (v.law == "unknown_label") {
    for (const auto& label : w)
      if (!raw.has_element(label)) return true;
    return false;
  }
  if (v.law == "conflicting_entry") {
    if (w.size() != 2) return false;
    std::optional<std::string_view> seen;
    for (const auto& row : table.compose) {
      if (row[0] != w[0] || row[1] != w[1]) continue;
      if (seen && *seen != row[2]) return true;
      seen = row[2];
    }
    return false;
  }
  if (v.law == "unit") {
    if (w.size() != 1) return false;
    auto c = raw.compose(table.unit, w[0]);
    return !c || *c != w[0];
  }
  if (v.law == "commutativity") {
    if (w.size() != 2) return false;
    auto ab = raw.compose(w[0], w[1]);
    auto ba = raw.compose(w[1], w[0]);
    return ab != ba;
  }
  if (v.law == "associativity") {
    if (w.size() != 3) return false;
    auto ab = raw.compose(w[0], w[1]);
    auto bc = raw.compose(w[1], w[2]);
    auto lhs = ab ? raw.compose(*ab, w[2]) : std::nullopt;
    auto rhs = bc ? raw.compose(w[0], *bc) : std::nullopt;
    return lhs != rhs;
  }
  if (v.law == "cancellativity") {
    if (w.size() != 3 || w[1] == w[2]) return false;
    auto ab = raw.compose(w[0], w[1]);
    auto ac = raw.compose(w[0], w[2]);
    return ab && ac && *ab == *ac;
  }
  if (v.law == "size_guard") return true;
  if (v.law == "structure") return table.elements.empty();
  return false;
}

std::optional<std::pair<ElementId, ElementId>> negativity_witness(const SeparationAlgebra& a) {
  const std::uint32_t n = static_cast<std::uint32_t>(a.size());
  const std::uint32_t u = a.unit_index();
  for (std::uint32_t s = 0; s < n; ++s) {
    if (s == u) continue;
    for (std::uint32_t t = 0; t < n; ++t)
      if (a.compose_raw(s, t) == u)
        return std::make_pair(ElementId{&a, s}, ElementId{&a, t});
  }
  return std::nullopt;
}

WellFoundedness check_well_founded(const SeparationAlgebra& a) {
  // In a finite algebra, every infinite descending chain wraps into a cycle
  // of the strict substate order, so well-foundedness is acyclicity of the
  // edge set {sub -> whole | sub strictly below whole}.
  const std::uint32_t n = static_cast<std::uint32_t>(a.size());
  std::vector<std::vector<std::uint32_t>> above(n);
  for (std::uint32_t e = 0; e < n; ++e)
    for (const auto& [sub, delta] : a.decompositions(e))
      if (sub != e) above[sub].push_back(e);

  enum : std::uint8_t { White, Gray, Black };
  std::vector<std::uint8_t> color(n, White);
  std::vector<std::uint32_t> parent(n, kNoElement);

  for (std::uint32_t root = 0; root < n; ++root) {
    if (color[root] != White) continue;
    // Iterative DFS; frame second member is the next edge offset.
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    color[root] = Gray;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < above[v].size()) {
        const std::uint32_t w = above[v][next++];
        if (color[w] == White) {
          color[w] = Gray;
          parent[w] = v;
          stack.emplace_back(w, 0);
        } else if (color[w] == Gray) {
          WellFoundedness result;
          std::vector<std::uint32_t> chain{v};
          for (std::uint32_t c = v; c != w; c = parent[c]) chain.push_back(parent[c]);
          std::reverse(chain.begin(), chain.end());
          for (std::uint32_t c : chain) result.cycle.push_back(ElementId{&a, c});
          return result;
        }
      } else {
        color[v] = Black;
        stack.pop_back();
      }
    }
  }
  return WellFoundedness{true, {}};
}

Predicate::Predicate(AlgebraPtr algebra)
    : algebra_(std::move(algebra)), words_(algebra_ ? algebra_->set_words() : 0) {
  if (!algebra_) throw AlgebraError("predicate requires an algebra");
}

Predicate Predicate::full(AlgebraPtr algebra) {
  Predicate p(std::move(algebra));
  const std::size_t n = p.algebra_->size();
  for (std::size_t i = 0; i < p.words_.size(); ++i) p.words_[i] = ~std::uint64_t{0};
  if (n % 64) p.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
  return p;
}

Predicate Predicate::single(ElementId e) {
  if (!e.algebra) throw AlgebraError("null element handle");
  Predicate p(e.algebra->shared_from_this());
  p.insert(e);
  return p;
}

void Predicate::insert(ElementId e) {
  algebra_->require(e);
  insert_index(e.index);
}

void Predicate::erase(ElementId e) {
  algebra_->require(e);
  erase_index(e.index);
}

bool Predicate::contains(ElementId e) const {
  algebra_->require(e);
  return contains_index(e.index);
}

bool Predicate::empty() const { return detail::words_empty(words_); }

std::size_t Predicate::count() const {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

std::vector<ElementId> Predicate::elements() const {
  std::vector<ElementId> out;
  out.reserve(count());
  for_each_index([&](std::uint32_t i) { out.push_back(ElementId{algebra_.get(), i}); });
  return out;
}

std::optional<ElementId> Predicate::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i])
      return ElementId{algebra_.get(),
                       static_cast<std::uint32_t>(i * 64 + std::countr_zero(words_[i]))};
  return std::nullopt;
}

void Predicate::check_same(const Predicate& other) const {
  if (algebra_.get() != other.algebra_.get())
    throw AlgebraError("predicates belong to different algebras");
}

Predicate& Predicate::operator&=(const Predicate& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Predicate& Predicate::operator|=(const Predicate& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Predicate& Predicate::operator-=(const Predicate& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool Predicate::subset_of(const Predicate& other) const {
  check_same(other);
  return detail::words_subset(words_, other.words_);
}

std::strong_ordering operator<=>(const Predicate& a, const Predicate& b) {
  if (a.algebra_.get() != b.algebra_.get())
    return a.algebra_.get() <=> b.algebra_.get();
  return std::lexicographical_compare_three_way(a.words_.begin(), a.words_.end(),
                                                b.words_.begin(), b.words_.end());
}

PrecisionVerdict check_precise(const Predicate& p) {
  const SeparationAlgebra& a = *p.algebra();
  const std::uint32_t n = static_cast<std::uint32_t>(a.size());
  for (std::uint32_t s = 0; s < n; ++s) {
    std::uint32_t found = kNoElement;
    for (const auto& [sub, delta] : a.decompositions(s)) {
      if (!p.contains_index(sub)) continue;
      if (found != kNoElement) {
        return PrecisionVerdict{
            false,
            std::array<ElementId, 3>{ElementId{&a, s}, ElementId{&a, found}, ElementId{&a, sub}}};
      }
      found = sub;
    }
  }
  return PrecisionVerdict{true, std::nullopt};
}

}  // namespace sepalg
