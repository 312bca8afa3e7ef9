#include "support.hpp"

#include <algorithm>

namespace sepalg::testing {

namespace {

BuiltModel make_h1_tiny() {
  ModelConfig cfg;
  cfg.locations = {1, 2};
  cfg.values = {0, 1, 2};
  cfg.variables = {"x", "y"};
  return build_stack_heap(cfg);
}

BuiltModel make_h2_tiny() {
  ModelConfig cfg;
  cfg.locations = {1, 2};
  cfg.values = {0, 1, 2};
  cfg.variables = {"x", "y"};
  return build_freeset_heap(cfg);
}

BuiltModel make_ph2() {
  ModelConfig cfg;
  cfg.locations = {1, 2};
  cfg.values = {7};
  return build_plain_heap(cfg);
}

}  // namespace

const BuiltModel& ph2() {
  static const BuiltModel model = make_ph2();
  return model;
}

const BuiltModel& h1_tiny() {
  static const BuiltModel model = make_h1_tiny();
  return model;
}

const BuiltModel& h2_tiny() {
  static const BuiltModel model = make_h2_tiny();
  return model;
}

const BuiltModel& z3() {
  static const BuiltModel model = build_zmod(3);
  return model;
}

const BuiltModel& z5() {
  static const BuiltModel model = build_zmod(5);
  return model;
}

ElementId el(const BuiltModel& model, std::string_view text) {
  const auto found = model.parse_element(text);
  if (!found) throw std::invalid_argument("fixture has no element '" + std::string(text) + "'");
  return *found;
}

Predicate pred(const BuiltModel& model, std::initializer_list<const char*> labels) {
  Predicate p(model.algebra);
  for (const char* label : labels) p.insert(el(model, label));
  return p;
}

Outcome naive_local_limit(const LocalFunction& f, ElementId state) {
  const AlgebraPtr alg = f.algebra();
  std::vector<Outcome> terms;
  for (const auto& [sub, delta] : alg->decompositions(state.index)) {
    if (sub == state.index) continue;
    terms.push_back(star(Predicate::single(alg->element(delta)), f.apply_index(sub)));
  }
  return meet(alg, terms);
}

Outcome naive_local_limit_by(const Predicate& from, const LocalFunction& f, ElementId state) {
  const AlgebraPtr alg = f.algebra();
  std::vector<Outcome> terms;
  for (const auto& [sub, delta] : alg->decompositions(state.index)) {
    if (!from.contains_index(sub)) continue;
    terms.push_back(star(Predicate::single(alg->element(delta)), f.apply_index(sub)));
  }
  return meet(alg, terms);
}

bool naive_is_basis(const Predicate& from, const LocalFunction& f) {
  const AlgebraPtr alg = f.algebra();
  for (std::uint32_t i = 0; i < alg->size(); ++i)
    if (!(naive_local_limit_by(from, f, alg->element(i)) == f.apply_index(i))) return false;
  return true;
}

bool naive_is_local(const RawAction& action) {
  const AlgebraPtr alg = action.algebra;
  const std::size_t n = alg->size();
  for (std::uint32_t frame = 0; frame < n; ++frame) {
    const Predicate framed = Predicate::single(alg->element(frame));
    for (std::uint32_t base = 0; base < n; ++base) {
      if (alg->compose_raw(frame, base) == kNoElement) continue;
      const Outcome lhs = action.outcomes[alg->compose_raw(frame, base)];
      const Outcome rhs = star(framed, action.outcomes[base]);
      if (!lhs.leq(rhs)) return false;
    }
  }
  return true;
}

bool naive_det_const(const LocalFunction& f) {
  const AlgebraPtr alg = f.algebra();
  const std::size_t n = alg->size();
  for (std::uint32_t base = 0; base < n; ++base) {
    if (f.apply_index(base).is_fault()) continue;
    const Outcome value = f.apply_index(base);
    for (std::uint32_t frame = 0; frame < n; ++frame) {
      const Predicate framed = Predicate::single(alg->element(frame));
      const std::uint32_t combined = alg->compose_raw(frame, base);
      const Outcome lhs =
          combined == kNoElement ? Outcome::diverge(alg) : f.apply_index(combined);
      if (!(lhs == star(framed, value))) return false;
    }
  }
  return true;
}

Predicate random_predicate(const AlgebraPtr& algebra, Rng& rng, std::uint32_t percent_fill) {
  Predicate p(algebra);
  for (std::uint32_t i = 0; i < algebra->size(); ++i)
    if (rng.chance(percent_fill)) p.insert_index(i);
  return p;
}

Specification random_spec(const BuiltModel& model, Rng& rng) {
  const AlgebraPtr alg = model.algebra;
  Specification spec(alg);
  const std::size_t count = 1 + rng.below(3);
  for (std::size_t k = 0; k < count; ++k) {
    Predicate pre = random_predicate(alg, rng, 25);
    if (pre.empty()) pre.insert_index(static_cast<std::uint32_t>(rng.below(alg->size())));
    const Predicate post = random_predicate(alg, rng, 35);
    spec.add(Statement{pre, post});
  }
  return spec;
}

namespace {

/// Removal of one result state is safe iff every framed application still
/// sits below the shrunk image; images at other states only shrink, which
/// cannot break the ordering on their side.
bool removal_keeps_locality(const std::vector<Outcome>& outcomes, const AlgebraPtr& alg,
                            std::uint32_t base, const Outcome& shrunk) {
  const std::size_t n = alg->size();
  for (std::uint32_t frame = 0; frame < n; ++frame) {
    const std::uint32_t combined = alg->compose_raw(frame, base);
    if (combined == kNoElement) continue;
    const Outcome& lhs = combined == base ? shrunk : outcomes[combined];
    if (!lhs.leq(star(Predicate::single(alg->element(frame)), shrunk))) return false;
  }
  return true;
}

}  // namespace

LocalFunction random_local_function(const BuiltModel& model, Rng& rng, std::string name) {
  const LocalFunction seed = bla(random_spec(model, rng));
  const AlgebraPtr alg = seed.algebra();
  std::vector<Outcome> outcomes(seed.outcomes().begin(), seed.outcomes().end());
  const std::size_t n = alg->size();

  const std::size_t attempts = std::min<std::size_t>(2 * n, 64);
  for (std::size_t k = 0; k < attempts; ++k) {
    const auto base = static_cast<std::uint32_t>(rng.below(n));
    const Outcome& current = outcomes[base];
    if (current.is_fault() || current.states().empty()) continue;
    const auto victims = current.states().elements();
    const ElementId victim = victims[rng.below(victims.size())];
    Outcome shrunk = current;
    shrunk.mutable_states().erase(victim);
    if (removal_keeps_locality(outcomes, alg, base, shrunk)) outcomes[base] = shrunk;
  }

  return LocalFunction::seal(RawAction{alg, std::move(outcomes), std::move(name)});
}

LocalFunction satisfying_sample(const BuiltModel& model, const Specification& base, Rng& rng,
                                std::string) {
  Specification combined = base;
  const Specification extra = random_spec(model, rng);
  for (const Statement& s : extra.statements()) combined.add(s);
  return bla(combined);
}

std::vector<LocalFunction> all_primitives(const BuiltModel& model) {
  std::vector<CommandDescriptor> commands;
  switch (model.kind) {
    case ModelKind::plain_heap:
      for (int l : model.config.locations)
        commands.push_back({CommandDescriptor::Kind::dispose_loc, l, "", "", 0, 0});
      break;
    case ModelKind::stack_heap:
    case ModelKind::freeset_heap:
      for (const std::string& v : model.config.variables) {
        commands.push_back({CommandDescriptor::Kind::alloc, 0, v, "", 0, 0});
        commands.push_back({CommandDescriptor::Kind::dispose_var, 0, v, "", 0, 0});
        for (int value : model.config.values)
          commands.push_back({CommandDescriptor::Kind::mutate, 0, v, "", value, 0});
        for (const std::string& w : model.config.variables)
          if (v != w) commands.push_back({CommandDescriptor::Kind::lookup, 0, v, w, 0, 0});
      }
      break;
    case ModelKind::zmod:
      for (int c = 0; c < model.modulus; ++c)
        commands.push_back({CommandDescriptor::Kind::adder, 0, "", "", 0, c});
      commands.push_back({CommandDescriptor::Kind::multiplier, 0, "", "", 0, 1});
      break;
    case ModelKind::table:
      break;
  }
  std::vector<LocalFunction> out;
  out.reserve(commands.size() + 1);
  out.push_back(skip(model.algebra));
  for (const CommandDescriptor& cmd : commands) out.push_back(primitive(model, cmd));
  return out;
}

std::vector<LocalFunction> battery(const BuiltModel& model, Rng& rng, int random_count) {
  std::vector<LocalFunction> out = all_primitives(model);
  for (int i = 0; i < random_count; ++i)
    out.push_back(random_local_function(model, rng, "rand-" + std::to_string(i)));
  return out;
}

namespace {

DerivationNode random_node(const std::vector<Statement>& axioms, const AlgebraPtr& alg,
                           Rng& rng, int depth) {
  if (depth == 0 || rng.chance(35)) {
    return DerivationNode{Rule::Axiom, axioms[rng.below(axioms.size())], {}, std::nullopt};
  }
  switch (rng.below(4)) {
    case 0: {
      DerivationNode child = random_node(axioms, alg, rng, depth - 1);
      const Predicate frame = random_predicate(alg, rng, 20);
      Statement conclusion = apply_frame(child.conclusion, frame);
      DerivationNode node{Rule::Frame, std::move(conclusion), {}, frame};
      node.premises.push_back(std::move(child));
      return node;
    }
    case 1: {
      DerivationNode child = random_node(axioms, alg, rng, depth - 1);
      Predicate pre(alg);
      child.conclusion.pre.for_each_index([&](std::uint32_t i) {
        if (rng.chance(70)) pre.insert_index(i);
      });
      Predicate post = child.conclusion.post;
      post |= random_predicate(alg, rng, 15);
      Statement conclusion{std::move(pre), std::move(post)};
      DerivationNode node{Rule::Consequence, std::move(conclusion), {}, std::nullopt};
      node.premises.push_back(std::move(child));
      return node;
    }
    case 2: {
      DerivationNode a = random_node(axioms, alg, rng, depth - 1);
      DerivationNode b = random_node(axioms, alg, rng, depth - 1);
      const Statement stmts[] = {a.conclusion, b.conclusion};
      Statement conclusion = apply_union(alg, stmts);
      DerivationNode node{Rule::Union, std::move(conclusion), {}, std::nullopt};
      node.premises.push_back(std::move(a));
      node.premises.push_back(std::move(b));
      return node;
    }
    default: {
      DerivationNode a = random_node(axioms, alg, rng, depth - 1);
      DerivationNode b = random_node(axioms, alg, rng, depth - 1);
      const Statement stmts[] = {a.conclusion, b.conclusion};
      Statement conclusion = apply_intersection(stmts);
      DerivationNode node{Rule::Intersection, std::move(conclusion), {}, std::nullopt};
      node.premises.push_back(std::move(a));
      node.premises.push_back(std::move(b));
      return node;
    }
  }
}

void collect_nodes(DerivationNode& node, std::vector<DerivationNode*>& out) {
  out.push_back(&node);
  for (DerivationNode& child : node.premises) collect_nodes(child, out);
}

bool spec_contains(const Specification& phi, const Statement& s) {
  const auto& stmts = phi.statements();
  return std::binary_search(stmts.begin(), stmts.end(), s);
}

void toggle_random_state(Predicate& p, Rng& rng) {
  const auto i = static_cast<std::uint32_t>(rng.below(p.algebra()->size()));
  if (p.contains_index(i))
    p.erase_index(i);
  else
    p.insert_index(i);
}

/// Returns true if the node's conclusion was changed into one its rule can
/// no longer justify.
bool break_node(DerivationNode& node, const Specification& phi, Rng& rng) {
  switch (node.rule) {
    case Rule::Axiom: {
      for (int attempt = 0; attempt < 64; ++attempt) {
        Statement tweaked = node.conclusion;
        toggle_random_state(rng.chance(50) ? tweaked.pre : tweaked.post, rng);
        if (!spec_contains(phi, tweaked)) {
          node.conclusion = std::move(tweaked);
          return true;
        }
      }
      return false;
    }
    case Rule::Consequence: {
      const Statement& premise = node.premises.front().conclusion;
      if (premise.pre.count() < premise.pre.algebra()->size()) {
        // widen the new precondition past the old one
        for (std::uint32_t i = 0; i < premise.pre.algebra()->size(); ++i) {
          if (!premise.pre.contains_index(i)) {
            node.conclusion.pre.insert_index(i);
            return true;
          }
        }
      }
      if (!premise.post.empty()) {
        // drop an old postcondition state from the new one
        node.conclusion.post.erase(*premise.post.first());
        return true;
      }
      return false;
    }
    case Rule::Frame:
    case Rule::Union:
    case Rule::Intersection: {
      // conclusions are checked for exact equality, so any change breaks
      toggle_random_state(rng.chance(50) ? node.conclusion.pre : node.conclusion.post, rng);
      return true;
    }
  }
  return false;
}

}  // namespace

Derivation random_valid_derivation(const Specification& phi, const AlgebraPtr& alg, Rng& rng) {
  return Derivation{random_node(phi.statements(), alg, rng, 3)};
}

Derivation mutate_derivation(const Derivation& valid, const Specification& phi, Rng& rng) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    Derivation mutant = valid;
    std::vector<DerivationNode*> nodes;
    collect_nodes(mutant.root, nodes);
    if (break_node(*nodes[rng.below(nodes.size())], phi, rng)) return mutant;
  }
  throw std::logic_error("could not construct an invalid mutant");
}

std::optional<Statement> random_entailed_statement(const Specification& phi,
                                                   const LocalFunction& bla_phi, Rng& rng) {
  const AlgebraPtr alg = bla_phi.algebra();
  Predicate pre(alg);
  std::vector<std::uint32_t> safe;
  for (std::uint32_t i = 0; i < alg->size(); ++i)
    if (!bla_phi.apply_index(i).is_fault()) safe.push_back(i);
  if (safe.empty()) return std::nullopt;
  for (std::uint32_t i : safe)
    if (rng.chance(30)) pre.insert_index(i);
  if (pre.empty()) pre.insert_index(safe[rng.below(safe.size())]);

  Predicate post = random_predicate(alg, rng, 15);
  pre.for_each_index([&](std::uint32_t i) { post |= bla_phi.apply_index(i).states(); });
  (void)phi;
  return Statement{std::move(pre), std::move(post)};
}

}  // namespace sepalg::testing
