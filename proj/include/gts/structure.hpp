#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gts/formula.hpp"
#include "gts/kleene.hpp"
#include "gts/node_id.hpp"

namespace gts {

inline constexpr std::string_view kSummaryPred = "sm";

/// Declares the predicate vocabulary: unary core predicates (plus the
/// reserved `sm`), binary core predicates, and unary instrumentation
/// predicates with their meaning formulas. Meaning formulas may refer to
/// core predicates and to instrumentation predicates declared before them.
class PredicateSignature {
public:
  struct Instrumentation {
    std::string name;
    std::string var;     // the single free variable of the meaning formula
    Formula meaning;
  };

  void add_unary(const std::string& name);
  void add_binary(const std::string& name);
  void add_instrumentation(const std::string& name, const std::string& var, Formula meaning);

  bool has_predicate(const std::string& name) const;
  /// 1 for unary core, instrumentation and sm; 2 for binary core; 0 if unknown.
  int arity(const std::string& name) const;
  bool is_unary_core(const std::string& name) const;
  bool is_binary(const std::string& name) const;
  bool is_instrumentation(const std::string& name) const;

  const std::vector<std::string>& unary_core() const { return unary_; } // without sm
  const std::vector<std::string>& binary_core() const { return binary_; }
  const std::vector<Instrumentation>& instrumentation() const { return instr_; }

  /// All unary predicates in canonical order: core, instrumentation, sm.
  /// This order defines the node valuation vector used by blurring.
  std::vector<std::string> unary_order() const;

  bool operator==(const PredicateSignature& other) const;

private:
  void check_fresh(const std::string& name) const;

  std::vector<std::string> unary_;
  std::vector<std::string> binary_;
  std::vector<Instrumentation> instr_;
};

using SignaturePtr = std::shared_ptr<const PredicateSignature>;

/// A finite logical structure: ordered universe of nodes plus a sparse
/// interpretation of every predicate (absent entries are 0). Represents both
/// concrete graphs (2-valued, sm == 0) and shape graphs (3-valued).
class LogicalStructure {
public:
  explicit LogicalStructure(SignaturePtr sig);

  const PredicateSignature& signature() const { return *sig_; }
  const SignaturePtr& signature_ptr() const { return sig_; }

  const std::vector<NodeId>& universe() const { return universe_; }
  bool has_node(const NodeId& node) const;
  void add_node(const NodeId& node);
  void remove_node(const NodeId& node);
  /// `stem` if unused, else `stem.1`, `stem.2`, ...
  NodeId fresh_node_id(const std::string& stem) const;

  TruthValue value(const std::string& pred, const NodeId& node) const;
  TruthValue value(const std::string& pred, const NodeId& a, const NodeId& b) const;
  void set_value(const std::string& pred, const NodeId& node, TruthValue v);
  void set_value(const std::string& pred, const NodeId& a, const NodeId& b, TruthValue v);

  TruthValue summary(const NodeId& node) const;
  bool is_summary(const NodeId& node) const;

  /// True iff no 1/2 value is stored anywhere (this implies sm == 0).
  bool is_two_valued() const;

  /// Valuation of all unary predicates (order per signature.unary_order()).
  std::vector<TruthValue> unary_vector(const NodeId& node) const;

  /// Deterministic serialisation that identifies structurally equal
  /// structures; used to short-circuit duplicate shapes before embedding
  /// checks. Node names participate, so it is not isomorphism-complete.
  std::string canonical_key() const;

  /// Structure block in the model-file text format.
  std::string to_text(std::string_view name) const;

  bool operator==(const LogicalStructure& other) const;

private:
  void check_unary(const std::string& pred) const;
  void check_binary(const std::string& pred) const;
  void check_node(const NodeId& node) const;

  SignaturePtr sig_;
  std::vector<NodeId> universe_;
  std::set<NodeId> node_set_;
  // sparse: never stores False
  std::map<std::string, std::map<NodeId, TruthValue>> unary_;
  std::map<std::string, std::map<std::pair<NodeId, NodeId>, TruthValue>> binary_;
};

struct LabelledEdge {
  NodeId src;
  std::string label;
  NodeId dst;

  friend bool operator==(const LabelledEdge&, const LabelledEdge&) = default;
  friend auto operator<=>(const LabelledEdge&, const LabelledEdge&) = default;
};

/// Plain labelled graph with set-semantics edges. Unary predicates appear as
/// loops (u, p, u); node types are such loops.
class Graph {
public:
  void add_node(const NodeId& node);
  void add_edge(const NodeId& src, const std::string& label, const NodeId& dst);

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::set<LabelledEdge>& edges() const { return edges_; }
  bool has_node(const NodeId& node) const;
  bool has_edge(const NodeId& src, const std::string& label, const NodeId& dst) const;

  bool operator==(const Graph& other) const;

private:
  std::vector<NodeId> nodes_;
  std::set<NodeId> node_set_;
  std::set<LabelledEdge> edges_;
};

/// 2-valued encoding of a graph. Unary labels must only appear on loops.
/// Instrumentation predicates are computed from their meaning formulas.
LogicalStructure encode_graph(const Graph& g, SignaturePtr sig);

/// Reads the binary core edges (value 1) and unary loops back out of a
/// 2-valued structure.
Graph decode_structure(const LogicalStructure& s);

/// Checks that f embeds s into `into`: f surjective, every predicate value
/// rises in the information order, and nodes with more than one preimage are
/// summaries. Throws if f is not a total map into the target universe.
bool check_embedding(const LogicalStructure& s, const LogicalStructure& into, const NodeMap& f);

/// Backtracking search for an embedding witness; deterministic in the
/// universe orders. Nodes are only tried against targets whose unary
/// valuations are information-above theirs.
std::optional<NodeMap> find_embedding(const LogicalStructure& s, const LogicalStructure& into);

inline bool embeds(const LogicalStructure& s, const LogicalStructure& into) {
  return find_embedding(s, into).has_value();
}

/// Collapses nodes that agree on the full unary valuation vector (including
/// sm). Block values are information joins; a block is a summary if it has
/// more than one member or any member was one.
LogicalStructure canonical_abstraction(const LogicalStructure& s);

/// Set of shapes kept maximal under embedding: no member embeds
/// one-directionally into another.
class AntichainSet {
public:
  struct InsertResult {
    bool inserted = false;
    std::vector<std::shared_ptr<const LogicalStructure>> evicted;
  };

  InsertResult insert(std::shared_ptr<const LogicalStructure> s);
  InsertResult insert(LogicalStructure s);

  std::size_t size() const { return members_.size(); }
  std::vector<std::shared_ptr<const LogicalStructure>> members() const;

private:
  struct Entry {
    std::shared_ptr<const LogicalStructure> shape;
    std::string key;
  };
  std::vector<Entry> members_;
};

} // namespace gts
