#include "sepalg/proof.hpp"

#include <algorithm>

namespace sepalg {

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Axiom:
      return "axiom";
    case Rule::Frame:
      return "frame";
    case Rule::Consequence:
      return "consequence";
    case Rule::Union:
      return "union";
    case Rule::Intersection:
      return "intersection";
  }
  return "?";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  if (name == "axiom") return Rule::Axiom;
  if (name == "frame") return Rule::Frame;
  if (name == "consequence") return Rule::Consequence;
  if (name == "union") return Rule::Union;
  if (name == "intersection") return Rule::Intersection;
  return std::nullopt;
}

Statement apply_frame(const Statement& s, const Predicate& r) {
  return Statement{star(s.pre, r), star(s.post, r)};
}

Statement apply_consequence(const Statement& s, const Predicate& new_pre,
                            const Predicate& new_post) {
  if (!new_pre.subset_of(s.pre))
    throw RuleError("consequence: the new precondition is not included in the old one");
  if (!s.post.subset_of(new_post))
    throw RuleError("consequence: the old postcondition is not included in the new one");
  return Statement{new_pre, new_post};
}

Statement apply_union(AlgebraPtr algebra, std::span<const Statement> family) {
  Statement out{Predicate(algebra), Predicate(algebra)};
  for (const Statement& s : family) {
    out.pre |= s.pre;
    out.post |= s.post;
  }
  return out;
}

Statement apply_intersection(std::span<const Statement> family) {
  if (family.empty()) throw RuleError("intersection: the family must be nonempty");
  Statement out = family.front();
  for (const Statement& s : family.subspan(1)) {
    out.pre &= s.pre;
    out.post &= s.post;
  }
  return out;
}

namespace {

bool check_node(const DerivationNode& node, const Specification& phi,
                std::vector<std::size_t>& path, std::string& error) {
  for (std::size_t i = 0; i < node.premises.size(); ++i) {
    path.push_back(i);
    if (!check_node(node.premises[i], phi, path, error)) return false;
    path.pop_back();
  }
  try {
    switch (node.rule) {
      case Rule::Axiom: {
        if (!node.premises.empty()) {
          error = "axiom node has premises";
          return false;
        }
        const auto& pool = phi.statements();
        if (!std::binary_search(pool.begin(), pool.end(), node.conclusion)) {
          error = "axiom statement is not in the specification";
          return false;
        }
        return true;
      }
      case Rule::Frame: {
        if (node.premises.size() != 1) {
          error = "frame node needs exactly one premise";
          return false;
        }
        if (!node.frame) {
          error = "frame node is missing its frame predicate";
          return false;
        }
        if (!(node.conclusion == apply_frame(node.premises[0].conclusion, *node.frame))) {
          error = "frame conclusion does not match the framed premise";
          return false;
        }
        return true;
      }
      case Rule::Consequence: {
        if (node.premises.size() != 1) {
          error = "consequence node needs exactly one premise";
          return false;
        }
        apply_consequence(node.premises[0].conclusion, node.conclusion.pre, node.conclusion.post);
        return true;
      }
      case Rule::Union: {
        std::vector<Statement> family;
        family.reserve(node.premises.size());
        for (const DerivationNode& p : node.premises) family.push_back(p.conclusion);
        if (!(node.conclusion == apply_union(phi.algebra(), family))) {
          error = "union conclusion does not match the joined premises";
          return false;
        }
        return true;
      }
      case Rule::Intersection: {
        std::vector<Statement> family;
        family.reserve(node.premises.size());
        for (const DerivationNode& p : node.premises) family.push_back(p.conclusion);
        if (!(node.conclusion == apply_intersection(family))) {
          error = "intersection conclusion does not match the met premises";
          return false;
        }
        return true;
      }
    }
    error = "unknown rule";
    return false;
  } catch (const RuleError& e) {
    error = e.what();
    return false;
  }
}

}  // namespace

DerivationCheck check_derivation(const Derivation& d, const Specification& phi) {
  DerivationCheck result;
  if (!check_node(d.root, phi, result.failing_path, result.error)) return result;
  result.valid = true;
  result.conclusion = d.root.conclusion;
  result.failing_path.clear();
  return result;
}

Derivation derive_via_bla(const Specification& phi, const Statement& goal) {
  if (phi.algebra().get() != goal.pre.algebra().get())
    throw RuleError("specification and statement belong to different algebras");
  const LocalFunction best = bla(phi);
  if (!satisfies(best, goal))
    throw RuleError("statement is not a semantic consequence of the specification");

  const SeparationAlgebra& alg = *phi.algebra();
  std::vector<DerivationNode> per_state;
  goal.pre.for_each_index([&](std::uint32_t state) {
    // Every decomposition state = delta * sub with sub in some axiom's
    // precondition contributes one framed instance; the meet of their
    // postconditions is the best local action's value here, which is not
    // Fault because the goal is entailed.
    std::vector<DerivationNode> framed;
    for (const auto& [sub, delta] : alg.decompositions(state)) {
      for (const Statement& axiom : phi.statements()) {
        if (!axiom.pre.contains_index(sub)) continue;
        DerivationNode leaf{Rule::Axiom, axiom, {}, {}};
        Statement narrowed =
            apply_consequence(axiom, Predicate::single(alg.element(sub)), axiom.post);
        DerivationNode narrow{Rule::Consequence, narrowed, {std::move(leaf)}, {}};
        const Predicate frame = Predicate::single(alg.element(delta));
        Statement framed_stmt = apply_frame(narrowed, frame);
        framed.push_back(DerivationNode{Rule::Frame, std::move(framed_stmt), {std::move(narrow)},
                                        frame});
      }
    }
    std::vector<Statement> family;
    family.reserve(framed.size());
    for (const DerivationNode& n : framed) family.push_back(n.conclusion);
    Statement met = apply_intersection(family);
    per_state.push_back(DerivationNode{Rule::Intersection, std::move(met), std::move(framed), {}});
  });

  std::vector<Statement> family;
  family.reserve(per_state.size());
  for (const DerivationNode& n : per_state) family.push_back(n.conclusion);
  Statement joined = apply_union(phi.algebra(), family);
  DerivationNode united{Rule::Union, joined, std::move(per_state), {}};
  Statement weakened = apply_consequence(joined, goal.pre, goal.post);
  DerivationNode root{Rule::Consequence, std::move(weakened), {std::move(united)}, {}};
  return Derivation{std::move(root)};
}

}  // namespace sepalg
