#include "gts/structure.hpp"

#include <algorithm>
#include <sstream>

#include "gts/error.hpp"

namespace gts {

// ---------------------------------------------------------------------------
// PredicateSignature
// ---------------------------------------------------------------------------

void PredicateSignature::check_fresh(const std::string& name) const {
  if (name == kSummaryPred)
    throw ModelError("predicate name 'sm' is reserved");
  if (has_predicate(name))
    throw ModelError("duplicate predicate name '" + name + "'");
  if (name.empty())
    throw ModelError("empty predicate name");
}

void PredicateSignature::add_unary(const std::string& name) {
  check_fresh(name);
  unary_.push_back(name);
}

void PredicateSignature::add_binary(const std::string& name) {
  check_fresh(name);
  binary_.push_back(name);
}

void PredicateSignature::add_instrumentation(const std::string& name, const std::string& var,
                                             Formula meaning) {
  check_fresh(name);
  check_formula(meaning, *this);
  const std::set<std::string> free = meaning.free_vars();
  if (free != std::set<std::string>{var})
    throw ModelError("meaning formula of '" + name + "' must have exactly the free variable '" +
                     var + "'");
  instr_.push_back({name, var, std::move(meaning)});
}

bool PredicateSignature::has_predicate(const std::string& name) const {
  return arity(name) != 0;
}

int PredicateSignature::arity(const std::string& name) const {
  if (name == kSummaryPred) return 1;
  if (std::find(unary_.begin(), unary_.end(), name) != unary_.end()) return 1;
  if (std::find(binary_.begin(), binary_.end(), name) != binary_.end()) return 2;
  if (is_instrumentation(name)) return 1;
  return 0;
}

bool PredicateSignature::is_unary_core(const std::string& name) const {
  return name == kSummaryPred ||
         std::find(unary_.begin(), unary_.end(), name) != unary_.end();
}

bool PredicateSignature::is_binary(const std::string& name) const {
  return std::find(binary_.begin(), binary_.end(), name) != binary_.end();
}

bool PredicateSignature::is_instrumentation(const std::string& name) const {
  return std::any_of(instr_.begin(), instr_.end(),
                     [&](const Instrumentation& i) { return i.name == name; });
}

std::vector<std::string> PredicateSignature::unary_order() const {
  std::vector<std::string> order = unary_;
  for (const Instrumentation& i : instr_) order.push_back(i.name);
  order.emplace_back(kSummaryPred);
  return order;
}

bool PredicateSignature::operator==(const PredicateSignature& other) const {
  if (unary_ != other.unary_ || binary_ != other.binary_) return false;
  if (instr_.size() != other.instr_.size()) return false;
  for (std::size_t i = 0; i < instr_.size(); ++i) {
    if (instr_[i].name != other.instr_[i].name || instr_[i].var != other.instr_[i].var ||
        !(instr_[i].meaning == other.instr_[i].meaning))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// LogicalStructure
// ---------------------------------------------------------------------------

LogicalStructure::LogicalStructure(SignaturePtr sig) : sig_(std::move(sig)) {
  if (!sig_) throw Error("structure requires a signature");
}

bool LogicalStructure::has_node(const NodeId& node) const { return node_set_.count(node) > 0; }

void LogicalStructure::add_node(const NodeId& node) {
  if (node.str().empty()) throw Error("empty node id");
  if (has_node(node)) throw Error("duplicate node '" + node.str() + "'");
  universe_.push_back(node);
  node_set_.insert(node);
}

void LogicalStructure::remove_node(const NodeId& node) {
  check_node(node);
  universe_.erase(std::find(universe_.begin(), universe_.end(), node));
  node_set_.erase(node);
  for (auto it = unary_.begin(); it != unary_.end();) {
    it->second.erase(node);
    it = it->second.empty() ? unary_.erase(it) : std::next(it);
  }
  for (auto pit = binary_.begin(); pit != binary_.end();) {
    auto& values = pit->second;
    for (auto it = values.begin(); it != values.end();) {
      if (it->first.first == node || it->first.second == node)
        it = values.erase(it);
      else
        ++it;
    }
    pit = values.empty() ? binary_.erase(pit) : std::next(pit);
  }
}

NodeId LogicalStructure::fresh_node_id(const std::string& stem) const {
  NodeId candidate(stem);
  for (int i = 1; has_node(candidate); ++i)
    candidate = NodeId(stem + "." + std::to_string(i));
  return candidate;
}

void LogicalStructure::check_unary(const std::string& pred) const {
  if (sig_->arity(pred) != 1)
    throw EvalError("'" + pred + "' is not a unary predicate of this signature");
}

void LogicalStructure::check_binary(const std::string& pred) const {
  if (sig_->arity(pred) != 2)
    throw EvalError("'" + pred + "' is not a binary predicate of this signature");
}

void LogicalStructure::check_node(const NodeId& node) const {
  if (!has_node(node)) throw EvalError("node '" + node.str() + "' is not in the universe");
}

TruthValue LogicalStructure::value(const std::string& pred, const NodeId& node) const {
  check_unary(pred);
  check_node(node);
  auto pit = unary_.find(pred);
  if (pit == unary_.end()) return TruthValue::False;
  auto it = pit->second.find(node);
  return it == pit->second.end() ? TruthValue::False : it->second;
}

TruthValue LogicalStructure::value(const std::string& pred, const NodeId& a,
                                   const NodeId& b) const {
  check_binary(pred);
  check_node(a);
  check_node(b);
  auto pit = binary_.find(pred);
  if (pit == binary_.end()) return TruthValue::False;
  auto it = pit->second.find({a, b});
  return it == pit->second.end() ? TruthValue::False : it->second;
}

void LogicalStructure::set_value(const std::string& pred, const NodeId& node, TruthValue v) {
  check_unary(pred);
  check_node(node);
  if (pred == kSummaryPred && v == TruthValue::True)
    throw Error("sm may only be 0 or 1/2");
  if (v == TruthValue::False) {
    auto it = unary_.find(pred);
    if (it != unary_.end()) {
      it->second.erase(node);
      if (it->second.empty()) unary_.erase(it);
    }
  } else {
    unary_[pred][node] = v;
  }
}

void LogicalStructure::set_value(const std::string& pred, const NodeId& a, const NodeId& b,
                                 TruthValue v) {
  check_binary(pred);
  check_node(a);
  check_node(b);
  if (v == TruthValue::False) {
    auto it = binary_.find(pred);
    if (it != binary_.end()) {
      it->second.erase({a, b});
      if (it->second.empty()) binary_.erase(it);
    }
  } else {
    binary_[pred][{a, b}] = v;
  }
}

TruthValue LogicalStructure::summary(const NodeId& node) const {
  return value(std::string(kSummaryPred), node);
}

bool LogicalStructure::is_summary(const NodeId& node) const {
  return summary(node) == TruthValue::Maybe;
}

bool LogicalStructure::is_two_valued() const {
  for (const auto& [pred, values] : unary_)
    for (const auto& [node, v] : values)
      if (v == TruthValue::Maybe) return false;
  for (const auto& [pred, values] : binary_)
    for (const auto& [pair, v] : values)
      if (v == TruthValue::Maybe) return false;
  return true;
}

std::vector<TruthValue> LogicalStructure::unary_vector(const NodeId& node) const {
  std::vector<TruthValue> vec;
  for (const std::string& pred : sig_->unary_order()) vec.push_back(value(pred, node));
  return vec;
}

std::string LogicalStructure::canonical_key() const {
  // Universe sorted by unary vector, name as tie-break; all non-zero values.
  std::vector<NodeId> order = universe_;
  std::sort(order.begin(), order.end(), [&](const NodeId& a, const NodeId& b) {
    const auto va = unary_vector(a);
    const auto vb = unary_vector(b);
    if (va != vb) return va < vb;
    return a < b;
  });
  std::ostringstream os;
  for (const NodeId& u : order) {
    os << "n " << u.str();
    for (TruthValue v : unary_vector(u)) os << " " << static_cast<int>(v);
    os << ";";
  }
  for (const std::string& pred : sig_->binary_core()) {
    for (const NodeId& a : order) {
      for (const NodeId& b : order) {
        const TruthValue v = value(pred, a, b);
        if (v != TruthValue::False)
          os << pred << " " << a.str() << " " << b.str() << " " << static_cast<int>(v) << ";";
      }
    }
  }
  return os.str();
}

std::string LogicalStructure::to_text(std::string_view name) const {
  std::ostringstream os;
  os << "structure " << name << "\n";
  for (const NodeId& u : universe_) {
    os << "  node " << u.str();
    if (is_summary(u)) os << " sm=1/2";
    os << "\n";
  }
  std::vector<std::string> unary_preds = sig_->unary_order();
  unary_preds.pop_back(); // sm is printed on the node line
  for (const std::string& pred : unary_preds) {
    for (const NodeId& u : universe_) {
      const TruthValue v = value(pred, u);
      if (v != TruthValue::False)
        os << "  set " << pred << "(" << u.str() << ") = " << gts::to_text(v) << "\n";
    }
  }
  for (const std::string& pred : sig_->binary_core()) {
    for (const NodeId& a : universe_) {
      for (const NodeId& b : universe_) {
        const TruthValue v = value(pred, a, b);
        if (v != TruthValue::False)
          os << "  set " << pred << "(" << a.str() << "," << b.str() << ") = " << gts::to_text(v)
             << "\n";
      }
    }
  }
  os << "end\n";
  return os.str();
}

bool LogicalStructure::operator==(const LogicalStructure& other) const {
  return *sig_ == *other.sig_ && universe_ == other.universe_ && unary_ == other.unary_ &&
         binary_ == other.binary_;
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

void Graph::add_node(const NodeId& node) {
  if (node.str().empty()) throw Error("empty node id");
  if (node_set_.insert(node).second) nodes_.push_back(node);
}

void Graph::add_edge(const NodeId& src, const std::string& label, const NodeId& dst) {
  if (!has_node(src) || !has_node(dst))
    throw Error("edge endpoint missing: " + src.str() + " -" + label + "-> " + dst.str());
  edges_.insert({src, label, dst});
}

bool Graph::has_node(const NodeId& node) const { return node_set_.count(node) > 0; }

bool Graph::has_edge(const NodeId& src, const std::string& label, const NodeId& dst) const {
  return edges_.count({src, label, dst}) > 0;
}

bool Graph::operator==(const Graph& other) const {
  return node_set_ == other.node_set_ && edges_ == other.edges_;
}

// ---------------------------------------------------------------------------
// Graph <-> structure encoding
// ---------------------------------------------------------------------------

LogicalStructure encode_graph(const Graph& g, SignaturePtr sig) {
  LogicalStructure s(sig);
  for (const NodeId& n : g.nodes()) s.add_node(n);
  for (const LabelledEdge& e : g.edges()) {
    const int arity = sig->arity(e.label);
    if (arity == 0) throw ModelError("edge label '" + e.label + "' is not declared");
    if (sig->is_instrumentation(e.label))
      throw ModelError("instrumentation predicate '" + e.label + "' cannot be a graph label");
    if (e.label == kSummaryPred) throw ModelError("'sm' cannot be a graph label");
    if (arity == 1) {
      if (e.src != e.dst)
        throw ModelError("unary label '" + e.label + "' on a non-loop edge");
      s.set_value(e.label, e.src, TruthValue::True);
    } else {
      s.set_value(e.label, e.src, e.dst, TruthValue::True);
    }
  }
  // Instrumentation values are exact on concrete graphs: evaluate the meaning
  // formulas (declaration order allows layered definitions).
  for (const PredicateSignature::Instrumentation& instr : sig->instrumentation()) {
    for (const NodeId& u : g.nodes()) {
      Assignment m{{instr.var, u}};
      const TruthValue v = evaluate(instr.meaning, s, m);
      if (v == TruthValue::Maybe)
        throw Error("meaning formula of '" + instr.name + "' evaluated to 1/2 on a 2-valued graph");
      s.set_value(instr.name, u, v);
    }
  }
  return s;
}

Graph decode_structure(const LogicalStructure& s) {
  Graph g;
  for (const NodeId& u : s.universe()) g.add_node(u);
  const PredicateSignature& sig = s.signature();
  for (const std::string& pred : sig.unary_core()) {
    for (const NodeId& u : s.universe())
      if (s.value(pred, u) == TruthValue::True) g.add_edge(u, pred, u);
  }
  for (const std::string& pred : sig.binary_core()) {
    for (const NodeId& a : s.universe())
      for (const NodeId& b : s.universe())
        if (s.value(pred, a, b) == TruthValue::True) g.add_edge(a, pred, b);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

bool check_embedding(const LogicalStructure& s, const LogicalStructure& into, const NodeMap& f) {
  for (const NodeId& u : s.universe()) {
    auto it = f.find(u);
    if (it == f.end()) throw Error("embedding map is not total on '" + u.str() + "'");
    if (!into.has_node(it->second))
      throw Error("embedding image '" + it->second.str() + "' is outside the target universe");
  }

  // surjectivity
  std::set<NodeId> image;
  std::map<NodeId, int> preimages;
  for (const NodeId& u : s.universe()) {
    const NodeId& v = f.at(u);
    image.insert(v);
    ++preimages[v];
  }
  if (image.size() != into.universe().size()) return false;

  const PredicateSignature& sig = s.signature();
  for (const std::string& pred : sig.unary_order()) {
    for (const NodeId& u : s.universe())
      if (!info_le(s.value(pred, u), into.value(pred, f.at(u)))) return false;
  }
  for (const std::string& pred : sig.binary_core()) {
    for (const NodeId& a : s.universe())
      for (const NodeId& b : s.universe())
        if (!info_le(s.value(pred, a, b), into.value(pred, f.at(a), f.at(b)))) return false;
  }
  for (const auto& [v, count] : preimages) {
    if (count > 1 && !into.is_summary(v)) return false;
  }
  return true;
}

namespace {

struct EmbeddingSearch {
  const LogicalStructure& s;
  const LogicalStructure& into;
  std::vector<NodeId> source_order;
  NodeMap map;
  std::map<NodeId, int> used; // preimage counts in the target

  bool unary_compatible(const NodeId& u, const NodeId& v) const {
    for (const std::string& pred : s.signature().unary_order())
      if (!info_le(s.value(pred, u), into.value(pred, v))) return false;
    return true;
  }

  bool binary_compatible(const NodeId& u, const NodeId& v) const {
    for (const std::string& pred : s.signature().binary_core()) {
      if (!info_le(s.value(pred, u, u), into.value(pred, v, v))) return false;
      for (const auto& [w, x] : map) {
        if (!info_le(s.value(pred, u, w), into.value(pred, v, x))) return false;
        if (!info_le(s.value(pred, w, u), into.value(pred, x, v))) return false;
      }
    }
    return true;
  }

  bool search(std::size_t index) {
    if (index == source_order.size()) return used.size() == into.universe().size();
    // Surjectivity pruning: remaining assignments must be able to cover the
    // untouched part of the target universe.
    const std::size_t remaining = source_order.size() - index;
    if (into.universe().size() - used.size() > remaining) return false;

    const NodeId& u = source_order[index];
    for (const NodeId& v : into.universe()) {
      auto uit = used.find(v);
      const bool reuse = uit != used.end();
      if (reuse && !into.is_summary(v)) continue; // condition (2)
      if (!unary_compatible(u, v)) continue;
      if (!binary_compatible(u, v)) continue;
      map[u] = v;
      ++used[v];
      if (search(index + 1)) return true;
      map.erase(u);
      if (--used[v] == 0) used.erase(v);
    }
    return false;
  }
};

} // namespace

std::optional<NodeMap> find_embedding(const LogicalStructure& s, const LogicalStructure& into) {
  if (!(s.signature() == into.signature())) return std::nullopt;
  if (s.universe().size() < into.universe().size()) return std::nullopt; // no surjection
  if (s.universe().empty() && into.universe().empty()) return NodeMap{};
  EmbeddingSearch search{s, into, s.universe(), {}, {}};
  if (search.search(0)) return search.map;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Canonical abstraction (blur)
// ---------------------------------------------------------------------------

LogicalStructure canonical_abstraction(const LogicalStructure& s) {
  // Partition by the full unary valuation vector, sm included.
  std::map<std::vector<TruthValue>, std::vector<NodeId>> blocks;
  for (const NodeId& u : s.universe()) blocks[s.unary_vector(u)].push_back(u);

  const bool identity = std::all_of(blocks.begin(), blocks.end(),
                                    [](const auto& kv) { return kv.second.size() == 1; });
  if (identity) return s;

  // Deterministic block naming: the first member in universe order.
  std::map<NodeId, NodeId> block_of;
  std::vector<std::pair<NodeId, std::vector<NodeId>>> named; // representative, members
  for (const NodeId& u : s.universe()) {
    const auto& members = blocks[s.unary_vector(u)];
    if (members.front() == u) named.push_back({u, members});
    block_of[u] = members.front();
  }

  LogicalStructure out(s.signature_ptr());
  for (const auto& [rep, members] : named) out.add_node(rep);

  const PredicateSignature& sig = s.signature();
  std::vector<std::string> unary_preds = sig.unary_order();
  unary_preds.pop_back(); // handle sm separately

  for (const auto& [rep, members] : named) {
    for (const std::string& pred : unary_preds) {
      TruthValue v = s.value(pred, members.front());
      for (const NodeId& u : members) v = info_join(v, s.value(pred, u));
      out.set_value(pred, rep, v);
    }
    TruthValue sm = s.summary(members.front());
    if (members.size() > 1) sm = TruthValue::Maybe;
    for (const NodeId& u : members)
      if (s.is_summary(u)) sm = TruthValue::Maybe;
    out.set_value(std::string(kSummaryPred), rep, sm);
  }

  for (const std::string& pred : sig.binary_core()) {
    for (const auto& [rep_a, members_a] : named) {
      for (const auto& [rep_b, members_b] : named) {
        std::optional<TruthValue> v;
        for (const NodeId& a : members_a)
          for (const NodeId& b : members_b) {
            const TruthValue cur = s.value(pred, a, b);
            v = v ? info_join(*v, cur) : cur;
          }
        out.set_value(pred, rep_a, rep_b, *v);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// AntichainSet
// ---------------------------------------------------------------------------

AntichainSet::InsertResult AntichainSet::insert(std::shared_ptr<const LogicalStructure> s) {
  InsertResult result;
  const std::string key = s->canonical_key();
  for (const Entry& e : members_) {
    if (e.key == key) return result; // structurally identical member
  }
  // Covered by an existing member? (Mutual embedding means isomorphism, so
  // refusing the insert keeps the set maximal without duplicates.)
  for (const Entry& e : members_) {
    if (embeds(*s, *e.shape)) return result;
  }
  std::vector<Entry> kept;
  for (Entry& e : members_) {
    if (embeds(*e.shape, *s))
      result.evicted.push_back(std::move(e.shape));
    else
      kept.push_back(std::move(e));
  }
  kept.push_back({std::move(s), key});
  members_ = std::move(kept);
  result.inserted = true;
  return result;
}

AntichainSet::InsertResult AntichainSet::insert(LogicalStructure s) {
  return insert(std::make_shared<const LogicalStructure>(std::move(s)));
}

std::vector<std::shared_ptr<const LogicalStructure>> AntichainSet::members() const {
  std::vector<std::shared_ptr<const LogicalStructure>> out;
  out.reserve(members_.size());
  for (const Entry& e : members_) out.push_back(e.shape);
  return out;
}

} // namespace gts
