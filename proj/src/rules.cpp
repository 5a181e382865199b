#include "gts/rules.hpp"

#include <algorithm>

#include "gts/error.hpp"

namespace gts {

GraphRule::GraphRule(std::string name, Graph left, Graph right)
    : name_(std::move(name)), left_(std::move(left)), right_(std::move(right)) {
  if (name_.empty()) throw ModelError("rule without a name");
}

std::vector<NodeId> GraphRule::deleted_nodes() const {
  std::vector<NodeId> out;
  for (const NodeId& n : left_.nodes())
    if (!right_.has_node(n)) out.push_back(n);
  return out;
}

std::vector<NodeId> GraphRule::created_nodes() const {
  std::vector<NodeId> out;
  for (const NodeId& n : right_.nodes())
    if (!left_.has_node(n)) out.push_back(n);
  return out;
}

std::set<LabelledEdge> GraphRule::deleted_edges() const {
  std::set<LabelledEdge> out;
  for (const LabelledEdge& e : left_.edges())
    if (!right_.edges().count(e)) out.insert(e);
  return out;
}

std::set<LabelledEdge> GraphRule::created_edges() const {
  std::set<LabelledEdge> out;
  for (const LabelledEdge& e : right_.edges())
    if (!left_.edges().count(e)) out.insert(e);
  return out;
}

void ShapeRule::set_update(const std::string& instr, const NodeId& rhs_node, Formula f) {
  if (!rule_.right().has_node(rhs_node))
    throw ModelError("update target '" + rhs_node.str() + "' is not a right-hand-side node of rule '" +
                     name() + "'");
  updates_.insert_or_assign({instr, rhs_node}, std::move(f));
}

std::optional<Formula> ShapeRule::update(const std::string& instr, const NodeId& rhs_node) const {
  auto it = updates_.find({instr, rhs_node});
  if (it == updates_.end()) return std::nullopt;
  return it->second;
}

ShapeRule ShapeRule::with_identity_updates(GraphRule rule, const PredicateSignature& sig) {
  ShapeRule out(std::move(rule));
  for (const PredicateSignature::Instrumentation& instr : sig.instrumentation()) {
    for (const NodeId& v : out.rule().right().nodes()) {
      if (out.rule().left().has_node(v))
        out.set_update(instr.name, v, Formula::pred1(instr.name, v.str()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Production formula
// ---------------------------------------------------------------------------

namespace {

Formula left_side_formula(const Graph& left, const PredicateSignature& sig,
                          const std::string& context) {
  std::vector<Formula> parts;
  for (const LabelledEdge& e : left.edges()) {
    const int arity = sig.arity(e.label);
    if (arity == 0)
      throw ModelError(context + ": edge label '" + e.label + "' is not declared");
    if (sig.is_instrumentation(e.label) || e.label == kSummaryPred)
      throw ModelError(context + ": '" + e.label + "' cannot appear in a rule graph");
    if (arity == 2) {
      parts.push_back(Formula::pred2(e.label, e.src.str(), e.dst.str()));
    } else {
      if (e.src != e.dst)
        throw ModelError(context + ": unary label '" + e.label + "' on a non-loop edge");
      parts.push_back(Formula::pred1(e.label, e.src.str()));
    }
  }
  const auto& nodes = left.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      parts.push_back(Formula::negation(Formula::equal(nodes[i].str(), nodes[j].str())));
  for (const NodeId& n : nodes)
    parts.push_back(Formula::negation(Formula::pred1(std::string(kSummaryPred), n.str())));
  return Formula::conjoin_all(parts);
}

} // namespace

Formula production_formula(const GraphRule& rule, const PredicateSignature& sig) {
  return left_side_formula(rule.left(), sig, "rule '" + rule.name() + "'");
}

Formula pattern_formula(const ForbiddenPattern& pattern, const PredicateSignature& sig) {
  return left_side_formula(pattern.graph, sig, "pattern '" + pattern.name + "'");
}

// ---------------------------------------------------------------------------
// Matching enumeration
// ---------------------------------------------------------------------------

namespace {

struct MatchSearch {
  const LogicalStructure& s;
  const Graph& left;
  std::vector<NodeId> order;   // L-nodes, most-constrained first
  Assignment assignment;
  std::vector<Assignment> found;

  // Sound pruning only: skip a candidate when some left-hand-side conjunct is
  // definitely 0 under the partial assignment.
  bool compatible(const NodeId& lnode, const NodeId& target) const {
    for (const LabelledEdge& e : left.edges()) {
      const int arity = s.signature().arity(e.label);
      if (arity == 1) {
        if (e.src == lnode && s.value(e.label, target) == TruthValue::False) return false;
        continue;
      }
      const auto src_it = assignment.find(e.src.str());
      const auto dst_it = assignment.find(e.dst.str());
      if (e.src == lnode && e.dst == lnode) {
        if (s.value(e.label, target, target) == TruthValue::False) return false;
      } else if (e.src == lnode && dst_it != assignment.end()) {
        if (s.value(e.label, target, dst_it->second) == TruthValue::False) return false;
      } else if (e.dst == lnode && src_it != assignment.end()) {
        if (s.value(e.label, src_it->second, target) == TruthValue::False) return false;
      }
    }
    // injectivity conjunct: sharing a non-summary node makes !(a == b) false
    for (const auto& [var, node] : assignment) {
      if (node == target && !s.is_summary(target)) return false;
    }
    return true;
  }

  void search(std::size_t index) {
    if (index == order.size()) {
      found.push_back(assignment);
      return;
    }
    const NodeId& lnode = order[index];
    for (const NodeId& target : s.universe()) {
      if (!compatible(lnode, target)) continue;
      assignment[lnode.str()] = target;
      search(index + 1);
      assignment.erase(lnode.str());
    }
  }
};

} // namespace

std::vector<Matching> find_matchings(const LogicalStructure& s, const GraphRule& rule) {
  const Formula phi = production_formula(rule, s.signature());

  // Most-constrained-first: order L-nodes by descending incident edge count.
  std::vector<NodeId> order = rule.left().nodes();
  std::map<NodeId, int> degree;
  for (const LabelledEdge& e : rule.left().edges()) {
    ++degree[e.src];
    if (e.dst != e.src) ++degree[e.dst];
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](const NodeId& a, const NodeId& b) { return degree[a] > degree[b]; });

  MatchSearch search{s, rule.left(), std::move(order), {}, {}};
  search.search(0);

  std::vector<Matching> out;
  for (const Assignment& m : search.found) {
    const TruthValue v = evaluate(phi, s, m);
    if (v != TruthValue::False) out.push_back({m, v});
  }

  // Deterministic order: lexicographic universe indices over L-nodes in
  // left-graph order.
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < s.universe().size(); ++i) index[s.universe()[i]] = i;
  const auto& lnodes = rule.left().nodes();
  std::sort(out.begin(), out.end(), [&](const Matching& a, const Matching& b) {
    for (const NodeId& n : lnodes) {
      const std::size_t ia = index.at(a.assignment.at(n.str()));
      const std::size_t ib = index.at(b.assignment.at(n.str()));
      if (ia != ib) return ia < ib;
    }
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Concrete application
// ---------------------------------------------------------------------------

Graph apply_concrete(const Graph& g, const GraphRule& rule, const Assignment& m) {
  const Graph& left = rule.left();

  // validate the matching: total, injective, edge-preserving
  std::set<NodeId> image;
  for (const NodeId& n : left.nodes()) {
    auto it = m.find(n.str());
    if (it == m.end()) throw Error("matching does not cover L-node '" + n.str() + "'");
    if (!g.has_node(it->second))
      throw Error("matching image '" + it->second.str() + "' is not in the graph");
    if (!image.insert(it->second).second)
      throw Error("matching is not injective at '" + it->second.str() + "'");
  }
  for (const LabelledEdge& e : left.edges()) {
    if (!g.has_edge(m.at(e.src.str()), e.label, m.at(e.dst.str())))
      throw Error("matching does not preserve edge " + e.src.str() + " -" + e.label + "-> " +
                  e.dst.str());
  }

  // m-hat: matched L-nodes via m, created nodes get fresh ids
  std::map<NodeId, NodeId> mhat;
  for (const NodeId& n : left.nodes()) mhat[n] = m.at(n.str());

  std::set<NodeId> deleted;
  for (const NodeId& n : rule.deleted_nodes()) deleted.insert(m.at(n.str()));

  Graph h;
  std::set<std::string> taken;
  for (const NodeId& n : g.nodes())
    if (!deleted.count(n)) {
      h.add_node(n);
      taken.insert(n.str());
    }
  for (const NodeId& n : rule.created_nodes()) {
    std::string name = n.str();
    for (int i = 1; taken.count(name); ++i) name = n.str() + "." + std::to_string(i);
    taken.insert(name);
    const NodeId fresh(name);
    h.add_node(fresh);
    mhat[n] = fresh;
  }

  std::set<LabelledEdge> removed;
  for (const LabelledEdge& e : rule.deleted_edges())
    removed.insert({m.at(e.src.str()), e.label, m.at(e.dst.str())});

  for (const LabelledEdge& e : g.edges()) {
    if (removed.count(e)) continue;
    if (h.has_node(e.src) && h.has_node(e.dst)) h.add_edge(e.src, e.label, e.dst);
  }
  for (const LabelledEdge& e : rule.created_edges()) {
    const NodeId& src = mhat.at(e.src);
    const NodeId& dst = mhat.at(e.dst);
    if (h.has_node(src) && h.has_node(dst)) h.add_edge(src, e.label, dst);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Shape application
// ---------------------------------------------------------------------------

LogicalStructure apply_shape(const LogicalStructure& s, const ShapeRule& shape_rule,
                             const Assignment& m) {
  const GraphRule& rule = shape_rule.rule();
  const Graph& left = rule.left();
  const PredicateSignature& sig = s.signature();

  std::set<NodeId> image;
  for (const NodeId& n : left.nodes()) {
    auto it = m.find(n.str());
    if (it == m.end()) throw Error("matching does not cover L-node '" + n.str() + "'");
    if (!s.has_node(it->second))
      throw Error("matching image '" + it->second.str() + "' is not in the universe");
    if (!image.insert(it->second).second)
      throw Error("shape application requires an injective matching");
    if (s.is_summary(it->second))
      throw Error("shape application on summary node '" + it->second.str() +
                  "' (materialise first)");
  }
  for (const LabelledEdge& e : left.edges()) {
    const TruthValue v = sig.arity(e.label) == 1
                             ? s.value(e.label, m.at(e.src.str()))
                             : s.value(e.label, m.at(e.src.str()), m.at(e.dst.str()));
    if (v != TruthValue::True)
      throw Error("left-hand side of '" + rule.name() + "' does not hold definitely at the match");
  }

  std::set<NodeId> deleted;
  for (const NodeId& n : rule.deleted_nodes()) deleted.insert(m.at(n.str()));

  LogicalStructure out(s.signature_ptr());
  for (const NodeId& u : s.universe())
    if (!deleted.count(u)) out.add_node(u);

  // m-hat over R-nodes: preserved via m, created nodes fresh and concrete
  std::map<NodeId, NodeId> mhat;
  for (const NodeId& n : left.nodes())
    if (rule.right().has_node(n)) mhat[n] = m.at(n.str());
  std::vector<NodeId> created;
  for (const NodeId& n : rule.created_nodes()) {
    const NodeId fresh = out.fresh_node_id(n.str());
    out.add_node(fresh);
    mhat[n] = fresh;
    created.push_back(fresh);
  }

  std::set<LabelledEdge> minus; // m(E^-)
  for (const LabelledEdge& e : rule.deleted_edges())
    minus.insert({m.at(e.src.str()), e.label, m.at(e.dst.str())});
  std::set<LabelledEdge> plus; // m-hat(E^+)
  for (const LabelledEdge& e : rule.created_edges())
    plus.insert({mhat.at(e.src), e.label, mhat.at(e.dst)});

  // unary core (sm excluded)
  for (const std::string& pred : sig.unary_core()) {
    for (const NodeId& u : out.universe()) {
      TruthValue v;
      if (minus.count({u, pred, u}))
        v = TruthValue::False;
      else if (plus.count({u, pred, u}))
        v = TruthValue::True;
      else
        v = s.has_node(u) ? s.value(pred, u) : TruthValue::False;
      out.set_value(pred, u, v);
    }
  }
  // binary core
  for (const std::string& pred : sig.binary_core()) {
    for (const NodeId& a : out.universe()) {
      for (const NodeId& b : out.universe()) {
        TruthValue v;
        if (minus.count({a, pred, b}))
          v = TruthValue::False;
        else if (plus.count({a, pred, b}))
          v = TruthValue::True;
        else
          v = (s.has_node(a) && s.has_node(b)) ? s.value(pred, a, b) : TruthValue::False;
        out.set_value(pred, a, b, v);
      }
    }
  }
  // sm: created nodes are concrete, everything else keeps its value
  for (const NodeId& u : out.universe()) {
    if (s.has_node(u)) out.set_value(std::string(kSummaryPred), u, s.summary(u));
  }

  // instrumentation: recomputed on matched and created nodes against the
  // pre-state, copied elsewhere
  std::map<NodeId, NodeId> matched_rnode; // universe node -> R-node it realises
  for (const NodeId& n : rule.right().nodes()) matched_rnode[mhat.at(n)] = n;

  for (const PredicateSignature::Instrumentation& instr : sig.instrumentation()) {
    for (const NodeId& u : out.universe()) {
      auto it = matched_rnode.find(u);
      if (it == matched_rnode.end()) {
        out.set_value(instr.name, u, s.value(instr.name, u));
        continue;
      }
      const std::optional<Formula> gamma = shape_rule.update(instr.name, it->second);
      if (!gamma) {
        out.set_value(instr.name, u, TruthValue::Maybe); // information-safe default
        continue;
      }
      out.set_value(instr.name, u, evaluate(*gamma, s, m));
    }
  }
  return out;
}

} // namespace gts
