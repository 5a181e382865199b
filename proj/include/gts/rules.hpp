#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gts/formula.hpp"
#include "gts/structure.hpp"

namespace gts {

/// SPO production rule. Nodes shared by name between L and R are preserved;
/// deltas are derived from the two graphs on demand.
class GraphRule {
public:
  GraphRule(std::string name, Graph left, Graph right);

  const std::string& name() const { return name_; }
  const Graph& left() const { return left_; }
  const Graph& right() const { return right_; }

  std::vector<NodeId> deleted_nodes() const;  // N_L \ N_R
  std::vector<NodeId> created_nodes() const;  // N_R \ N_L
  std::set<LabelledEdge> deleted_edges() const;
  std::set<LabelledEdge> created_edges() const;

private:
  std::string name_;
  Graph left_;
  Graph right_;
};

/// A production rule together with instrumentation update formulas.
/// gamma(p, v) gives the post-state value of instrumentation predicate p on
/// the right-hand-side node v, evaluated in the pre-state under the matching
/// assignment. Missing entries default to 1/2 (information-safe).
class ShapeRule {
public:
  using UpdateKey = std::pair<std::string, NodeId>; // (instr predicate, rhs node)

  explicit ShapeRule(GraphRule rule) : rule_(std::move(rule)) {}
  ShapeRule(GraphRule rule, std::map<UpdateKey, Formula> updates)
      : rule_(std::move(rule)), updates_(std::move(updates)) {}

  const GraphRule& rule() const { return rule_; }
  const std::string& name() const { return rule_.name(); }
  const std::map<UpdateKey, Formula>& updates() const { return updates_; }

  void set_update(const std::string& instr, const NodeId& rhs_node, Formula f);
  std::optional<Formula> update(const std::string& instr, const NodeId& rhs_node) const;

  /// gamma(p, v) = p(v) for every preserved node; created nodes keep the
  /// default. Only meaningful for rules whose updates should be no-ops.
  static ShapeRule with_identity_updates(GraphRule rule, const PredicateSignature& sig);

private:
  GraphRule rule_;
  std::map<UpdateKey, Formula> updates_;
};

/// Forbidden pattern, treated as the rule <F, F> when matched.
struct ForbiddenPattern {
  std::string name;
  Graph graph;
};

/// Conjunction of the rule's left-hand side: binary edges, unary loops,
/// pairwise injectivity and non-summarisation of all L-nodes. TRUE when L is
/// empty. Free variables are exactly the L-node names.
Formula production_formula(const GraphRule& rule, const PredicateSignature& sig);
Formula pattern_formula(const ForbiddenPattern& pattern, const PredicateSignature& sig);

struct Matching {
  Assignment assignment; // L-node name -> universe node
  TruthValue value;      // 1 = applicable, 1/2 = potentially applicable
};

/// All assignments under which the production formula is non-zero, in
/// lexicographic universe order over the L-nodes.
std::vector<Matching> find_matchings(const LogicalStructure& s, const GraphRule& rule);

/// Concrete SPO application: deleted nodes take their incident edges with
/// them, created nodes get fresh ids when their name is taken. The matching
/// must be injective and edge-preserving.
Graph apply_concrete(const Graph& g, const GraphRule& rule, const Assignment& m);

/// Shape-level application per the production-rule case tables: core values
/// flip on the deleted/created edge images, created nodes are concrete, and
/// instrumentation values on matched/created nodes are recomputed by the
/// update formulas against the pre-state. Requires an injective matching
/// whose L-edges all hold definitely (the state after materialise + coerce).
LogicalStructure apply_shape(const LogicalStructure& s, const ShapeRule& rule, const Assignment& m);

} // namespace gts
