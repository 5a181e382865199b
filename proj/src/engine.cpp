#include "gts/engine.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <future>
#include <sstream>

#include "gts/error.hpp"
#include "gts/log.hpp"

namespace gts {

// ---------------------------------------------------------------------------
// Compatibility constraints
// ---------------------------------------------------------------------------

CompatibilityConstraint::CompatibilityConstraint(Formula body, bool head_negated,
                                                 std::string head_pred,
                                                 std::vector<std::string> head_vars)
    : body_(std::move(body)), head_negated_(head_negated), head_pred_(std::move(head_pred)),
      head_vars_(std::move(head_vars)) {
  if (head_vars_.empty() || head_vars_.size() > 2)
    throw ModelError("constraint head must be a unary or binary atom");
  const std::set<std::string> free = body_.free_vars();
  for (const std::string& v : head_vars_)
    if (!free.count(v))
      throw ModelError("constraint head variable '" + v + "' is not free in the body");
  if (head_pred_ == kSummaryPred && !head_negated_)
    throw ModelError("a constraint may not force sm to 1");
}

void CompatibilityConstraint::check(const PredicateSignature& sig) const {
  check_formula(body_, sig);
  if (!sig.has_predicate(head_pred_))
    throw ModelError("unknown predicate '" + head_pred_ + "' in constraint head");
  if (sig.arity(head_pred_) != static_cast<int>(head_vars_.size()))
    throw ModelError("arity mismatch in constraint head '" + head_pred_ + "'");
}

std::string CompatibilityConstraint::to_text() const {
  std::ostringstream os;
  os << body_.to_text() << " => ";
  if (head_negated_) os << "!";
  os << head_pred_ << "(" << head_vars_[0];
  if (head_vars_.size() == 2) os << "," << head_vars_[1];
  os << ")";
  return os.str();
}

ConstraintList derive_constraints(const PredicateSignature& sig) {
  ConstraintList out;
  for (const PredicateSignature::Instrumentation& instr : sig.instrumentation()) {
    out.emplace_back(instr.meaning, false, instr.name, std::vector<std::string>{instr.var});
    out.emplace_back(Formula::negation(instr.meaning), true, instr.name,
                     std::vector<std::string>{instr.var});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Materialisation
// ---------------------------------------------------------------------------

std::set<NodeId> summary_targets(const LogicalStructure& s, const GraphRule& rule,
                                 const Assignment& m) {
  std::set<NodeId> out;
  for (const NodeId& n : rule.left().nodes()) {
    const NodeId& target = m.at(n.str());
    if (s.is_summary(target)) out.insert(target);
  }
  return out;
}

LogicalStructure materialise(const LogicalStructure& s, const GraphRule& rule,
                             const Assignment& m, const std::set<NodeId>& keep) {
  const PredicateSignature& sig = s.signature();
  const Formula phi = production_formula(rule, sig);
  if (evaluate(phi, s, m) != TruthValue::Maybe)
    throw Error("materialise requires a potential matching (production formula = 1/2)");
  {
    const std::set<NodeId> summaries = summary_targets(s, rule, m);
    for (const NodeId& u : keep)
      if (!summaries.count(u))
        throw Error("kept node '" + u.str() + "' is not a matched summary node");
  }

  const Graph& left = rule.left();

  // removed originals: matched nodes not kept
  std::set<NodeId> removed;
  for (const NodeId& n : left.nodes()) {
    const NodeId& target = m.at(n.str());
    if (!keep.count(target)) removed.insert(target);
  }

  LogicalStructure out(s.signature_ptr());
  for (const NodeId& u : s.universe())
    if (!removed.count(u)) out.add_node(u);

  // Fresh concrete copies for the L-node names, freshened against the full
  // original universe so no inherited value is captured.
  std::set<std::string> taken;
  for (const NodeId& u : s.universe()) taken.insert(u.str());
  std::map<NodeId, NodeId> fresh; // L-node -> new node
  for (const NodeId& n : left.nodes()) {
    std::string name = n.str();
    for (int i = 1; taken.count(name); ++i) name = n.str() + "." + std::to_string(i);
    taken.insert(name);
    fresh[n] = NodeId(name);
    out.add_node(fresh[n]);
  }

  // m-hat: new nodes inherit from their matched original, the rest from itself
  std::map<NodeId, NodeId> source;
  for (const NodeId& u : out.universe()) source[u] = u;
  for (const auto& [lnode, copy] : fresh) source[copy] = m.at(lnode.str());

  std::set<NodeId> is_fresh;
  for (const auto& [lnode, copy] : fresh) is_fresh.insert(copy);

  std::set<LabelledEdge> l_edges; // over the fresh copies
  for (const LabelledEdge& e : left.edges())
    l_edges.insert({fresh.at(e.src), e.label, fresh.at(e.dst)});

  std::vector<std::string> unary_preds = sig.unary_order();
  unary_preds.pop_back();
  for (const std::string& pred : unary_preds) {
    const bool core = sig.is_unary_core(pred);
    for (const NodeId& u : out.universe()) {
      if (core && is_fresh.count(u) && l_edges.count({u, pred, u}))
        out.set_value(pred, u, TruthValue::True);
      else
        out.set_value(pred, u, s.value(pred, source.at(u)));
    }
  }
  for (const std::string& pred : sig.binary_core()) {
    for (const NodeId& a : out.universe()) {
      for (const NodeId& b : out.universe()) {
        if (is_fresh.count(a) && is_fresh.count(b) && l_edges.count({a, pred, b}))
          out.set_value(pred, a, b, TruthValue::True);
        else
          out.set_value(pred, a, b, s.value(pred, source.at(a), source.at(b)));
      }
    }
  }
  for (const NodeId& u : out.universe()) {
    const TruthValue sm =
        is_fresh.count(u) ? TruthValue::False : s.summary(source.at(u));
    out.set_value(std::string(kSummaryPred), u, sm);
  }
  return out;
}

std::vector<LogicalStructure> materialisations(const LogicalStructure& s, const GraphRule& rule) {
  std::vector<LogicalStructure> out;
  std::set<std::string> seen;
  auto push = [&](LogicalStructure m) {
    std::string key = m.canonical_key();
    if (seen.insert(std::move(key)).second) out.push_back(std::move(m));
  };

  bool regular = false;
  for (const Matching& match : find_matchings(s, rule)) {
    if (match.value == TruthValue::True) {
      if (!regular) {
        push(s); // the rule is definitely present, no focusing needed
        regular = true;
      }
      continue;
    }
    const std::set<NodeId> summaries = summary_targets(s, rule, match.assignment);
    const std::vector<NodeId> gamma(summaries.begin(), summaries.end());
    const std::size_t subsets = std::size_t{1} << gamma.size();
    for (std::size_t bits = 0; bits < subsets; ++bits) {
      std::set<NodeId> keep;
      for (std::size_t i = 0; i < gamma.size(); ++i)
        if (bits & (std::size_t{1} << i)) keep.insert(gamma[i]);
      push(materialise(s, rule, match.assignment, keep));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coercion
// ---------------------------------------------------------------------------

namespace {

// Enumerates all assignments of `vars` over the universe.
template <typename Fn>
bool for_each_assignment(const LogicalStructure& s, const std::vector<std::string>& vars,
                         Assignment& m, std::size_t index, Fn&& fn) {
  if (index == vars.size()) return fn(m);
  for (const NodeId& u : s.universe()) {
    m[vars[index]] = u;
    if (!for_each_assignment(s, vars, m, index + 1, fn)) return false;
  }
  m.erase(vars[index]);
  return true;
}

enum class SharpenOutcome { Unchanged, Sharpened, Inconsistent };

SharpenOutcome apply_constraint(LogicalStructure& s, const CompatibilityConstraint& c) {
  const std::set<std::string> free = c.body().free_vars();
  const std::vector<std::string> vars(free.begin(), free.end());
  const TruthValue target = c.head_negated() ? TruthValue::False : TruthValue::True;
  SharpenOutcome outcome = SharpenOutcome::Unchanged;
  Assignment m;
  const bool ok = for_each_assignment(s, vars, m, 0, [&](const Assignment& full) {
    if (evaluate(c.body(), s, full) != TruthValue::True) return true;
    const NodeId& a = full.at(c.head_vars()[0]);
    const TruthValue current =
        c.head_vars().size() == 1 ? s.value(c.head_pred(), a)
                                  : s.value(c.head_pred(), a, full.at(c.head_vars()[1]));
    if (current == target) return true;
    if (current != TruthValue::Maybe) {
      outcome = SharpenOutcome::Inconsistent;
      return false;
    }
    if (c.head_vars().size() == 1)
      s.set_value(c.head_pred(), a, target);
    else
      s.set_value(c.head_pred(), a, full.at(c.head_vars()[1]), target);
    outcome = SharpenOutcome::Sharpened;
    return true;
  });
  if (!ok) return SharpenOutcome::Inconsistent;
  return outcome;
}

} // namespace

std::optional<LogicalStructure> coerce(const LogicalStructure& s,
                                       const ConstraintList& constraints) {
  LogicalStructure out = s;
  // Each round either sharpens at least one 1/2 entry or reaches the
  // fixpoint, so this terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const CompatibilityConstraint& c : constraints) {
      switch (apply_constraint(out, c)) {
      case SharpenOutcome::Inconsistent:
        return std::nullopt;
      case SharpenOutcome::Sharpened:
        changed = true;
        break;
      case SharpenOutcome::Unchanged:
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step pipeline
// ---------------------------------------------------------------------------

std::string_view stage_name(PipelineStage stage) {
  switch (stage) {
  case PipelineStage::Materialise: return "materialise";
  case PipelineStage::Coerce: return "coerce";
  case PipelineStage::Apply: return "apply";
  case PipelineStage::PostCoerce: return "post-coerce";
  case PipelineStage::Blur: return "blur";
  }
  return "?";
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
  case Verdict::Safe: return "SAFE";
  case Verdict::Unsafe: return "UNSAFE";
  case Verdict::BoundExceeded: return "BOUND_EXCEEDED";
  }
  return "?";
}

namespace {

void note(EngineStats* stats, const StageSink& sink, PipelineStage stage,
          const LogicalStructure& s) {
  if (stats) ++stats->intermediate_structures;
  if (sink) sink(stage, s);
}

void assert_mat_in_focus(const LogicalStructure& mat, const LogicalStructure& origin,
                         const ShapeRule& rule) {
  if (!embeds(mat, origin))
    throw Error("materialisation of '" + rule.name() + "' does not embed into its origin");
  const auto matchings = find_matchings(mat, rule.rule());
  const bool definite = std::any_of(matchings.begin(), matchings.end(),
                                    [](const Matching& m) { return m.value == TruthValue::True; });
  if (!definite)
    throw Error("materialisation of '" + rule.name() + "' admits no definite matching");
}

} // namespace

std::vector<StepSuccessor> step(const LogicalStructure& s, const ShapeRule& rule,
                                const ConstraintList& constraints, const StepOptions& options,
                                EngineStats* stats) {
  std::vector<StepSuccessor> out;
  std::set<std::string> seen;
  for (const LogicalStructure& mat : materialisations(s, rule.rule())) {
    note(stats, options.sink, PipelineStage::Materialise, mat);
    if (options.check_mat_focus) assert_mat_in_focus(mat, s, rule);

    std::optional<LogicalStructure> focused = coerce(mat, constraints);
    if (!focused) continue;
    note(stats, options.sink, PipelineStage::Coerce, *focused);

    for (const Matching& match : find_matchings(*focused, rule.rule())) {
      if (match.value != TruthValue::True) continue;
      LogicalStructure applied = apply_shape(*focused, rule, match.assignment);
      note(stats, options.sink, PipelineStage::Apply, applied);

      std::optional<LogicalStructure> settled = coerce(applied, constraints);
      if (!settled) continue;
      note(stats, options.sink, PipelineStage::PostCoerce, *settled);

      LogicalStructure final_shape = options.blur ? canonical_abstraction(*settled) : *settled;
      if (options.blur) note(stats, options.sink, PipelineStage::Blur, final_shape);

      if (seen.insert(final_shape.canonical_key()).second)
        out.push_back({std::move(final_shape), std::move(*settled), rule.name(), match.assignment});
    }
  }
  std::sort(out.begin(), out.end(), [](const StepSuccessor& a, const StepSuccessor& b) {
    return a.shape.canonical_key() < b.shape.canonical_key();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Pattern containment
// ---------------------------------------------------------------------------

bool check_pattern(const LogicalStructure& s, const ForbiddenPattern& pattern,
                   const ConstraintList& constraints) {
  const GraphRule as_rule(pattern.name, pattern.graph, pattern.graph);
  // Non-empty iff some assignment makes the pattern formula non-zero.
  const std::vector<LogicalStructure> mats = materialisations(s, as_rule);
  for (const LogicalStructure& mat : mats) {
    if (coerce(mat, constraints)) return true; // a consistent concretisation remains
  }
  return false;
}

// ---------------------------------------------------------------------------
// Reachability fixpoint
// ---------------------------------------------------------------------------

namespace {

struct ReachNode {
  std::shared_ptr<const LogicalStructure> shape;
  std::shared_ptr<const ReachNode> parent;
  std::string rule;
  Assignment applied_at;
  PipelineStage stage = PipelineStage::Blur;
  bool alive = true;
};

Trace build_trace(const std::shared_ptr<const ReachNode>& node, const std::string& pattern) {
  std::vector<TraceStep> steps;
  for (auto cur = node; cur && cur->parent; cur = cur->parent) {
    steps.push_back({cur->rule, cur->applied_at, std::string(stage_name(cur->stage)),
                     cur->shape->to_text("step")});
  }
  std::reverse(steps.begin(), steps.end());
  return {std::move(steps), pattern, node->shape->to_text("offending")};
}

bool pattern_hit(const LogicalStructure& s, const std::vector<ForbiddenPattern>& patterns,
                 const ConstraintList& constraints, std::string& hit) {
  for (const ForbiddenPattern& p : patterns) {
    if (check_pattern(s, p, constraints)) {
      hit = p.name;
      return true;
    }
  }
  return false;
}

} // namespace

AnalysisResult explore(const LogicalStructure& start, const std::vector<ShapeRule>& rules,
                       const std::vector<ForbiddenPattern>& patterns,
                       const ConstraintList& constraints, const ExploreLimits& limits,
                       const ExploreOptions& options) {
  const auto clock_start = std::chrono::steady_clock::now();
  AnalysisResult result;
  EngineStats& stats = result.stats;

  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  };
  auto finish = [&](Verdict verdict) {
    result.verdict = verdict;
    stats.wall_seconds = elapsed();
    stats.maximal_set_size = result.reachable.size();
    return result;
  };

  StepOptions step_options{options.blur, options.check_mat_focus, options.sink};

  std::optional<LogicalStructure> initial = coerce(start, constraints);
  if (!initial) throw ModelError("start shape fails coercion against the constraints");
  note(&stats, options.sink, PipelineStage::Coerce, *initial);
  LogicalStructure first = options.blur ? canonical_abstraction(*initial) : *initial;
  if (options.blur) note(&stats, options.sink, PipelineStage::Blur, first);

  AntichainSet antichain;
  std::deque<std::shared_ptr<ReachNode>> worklist;
  std::map<std::string, std::shared_ptr<ReachNode>> by_key;

  auto snapshot_reachable = [&] {
    result.reachable = antichain.members();
  };

  auto offer = [&](std::shared_ptr<ReachNode> node) -> bool {
    auto ins = antichain.insert(node->shape);
    if (!ins.inserted) return false;
    for (const auto& evicted : ins.evicted) {
      auto it = by_key.find(evicted->canonical_key());
      if (it != by_key.end()) it->second->alive = false;
    }
    by_key[node->shape->canonical_key()] = node;
    worklist.push_back(std::move(node));
    return true;
  };

  auto root = std::make_shared<ReachNode>();
  root->shape = std::make_shared<const LogicalStructure>(std::move(first));
  offer(root);
  {
    std::string hit;
    if (pattern_hit(*root->shape, patterns, constraints, hit)) {
      snapshot_reachable();
      result.trace = build_trace(root, hit);
      return finish(Verdict::Unsafe);
    }
  }

  const int jobs = options.deterministic ? 1 : std::max(1, options.jobs);

  while (!worklist.empty()) {
    if (stats.intermediate_structures > limits.max_structures) {
      snapshot_reachable();
      return finish(Verdict::BoundExceeded);
    }
    if (elapsed() > limits.max_seconds) {
      snapshot_reachable();
      return finish(Verdict::BoundExceeded);
    }

    // Pop a batch; members evicted from the antichain are not expanded.
    std::vector<std::shared_ptr<ReachNode>> batch;
    while (!worklist.empty() && batch.size() < static_cast<std::size_t>(jobs)) {
      auto node = worklist.front();
      worklist.pop_front();
      if (node->alive) batch.push_back(std::move(node));
    }
    if (batch.empty()) continue;

    struct BatchResult {
      std::shared_ptr<ReachNode> parent;
      std::vector<StepSuccessor> successors;
      EngineStats stats;
    };

    std::vector<BatchResult> results(batch.size());
    auto expand = [&](std::size_t i) {
      BatchResult& r = results[i];
      r.parent = batch[i];
      // The stage sink is only wired when running single-threaded.
      StepOptions local = step_options;
      if (jobs > 1) local.sink = nullptr;
      for (const ShapeRule& rule : rules) {
        auto succ = step(*batch[i]->shape, rule, constraints, local, &r.stats);
        r.successors.insert(r.successors.end(), std::make_move_iterator(succ.begin()),
                            std::make_move_iterator(succ.end()));
      }
    };

    if (jobs == 1 || batch.size() == 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) expand(i);
    } else {
      std::vector<std::future<void>> futures;
      for (std::size_t i = 0; i < batch.size(); ++i)
        futures.push_back(std::async(std::launch::async, expand, i));
      for (auto& f : futures) f.get();
    }

    // Serialized insertion in submission order keeps runs reproducible.
    for (BatchResult& r : results) {
      stats.intermediate_structures += r.stats.intermediate_structures;
      for (StepSuccessor& succ : r.successors) {
        auto node = std::make_shared<ReachNode>();
        node->parent = r.parent;
        node->rule = succ.rule;
        node->applied_at = succ.applied_at;
        node->stage = options.blur ? PipelineStage::Blur : PipelineStage::PostCoerce;

        if (options.eager_check) {
          std::string hit;
          if (pattern_hit(succ.pre_blur, patterns, constraints, hit)) {
            node->shape = std::make_shared<const LogicalStructure>(std::move(succ.pre_blur));
            node->stage = PipelineStage::PostCoerce;
            snapshot_reachable();
            result.trace = build_trace(node, hit);
            return finish(Verdict::Unsafe);
          }
        }

        node->shape = std::make_shared<const LogicalStructure>(std::move(succ.shape));
        // Pattern checking runs on structures accepted into the maximal set.
        if (!offer(node)) continue;
        std::string hit;
        if (pattern_hit(*node->shape, patterns, constraints, hit)) {
          snapshot_reachable();
          result.trace = build_trace(node, hit);
          return finish(Verdict::Unsafe);
        }
      }
    }
  }

  snapshot_reachable();
  log_info("explore: ", stats.intermediate_structures, " intermediate structures, ",
           result.reachable.size(), " maximal shapes");
  return finish(Verdict::Safe);
}

LogicalStructure replay_trace(const LogicalStructure& start, const std::vector<ShapeRule>& rules,
                              const ConstraintList& constraints, const Trace& trace,
                              const ExploreOptions& options) {
  std::optional<LogicalStructure> initial = coerce(start, constraints);
  if (!initial) throw Error("trace replay: start shape fails coercion");
  LogicalStructure current = options.blur ? canonical_abstraction(*initial) : *initial;

  StepOptions step_options{options.blur, false, nullptr};
  for (const TraceStep& ts : trace.steps) {
    const auto rule_it = std::find_if(rules.begin(), rules.end(),
                                      [&](const ShapeRule& r) { return r.name() == ts.rule; });
    if (rule_it == rules.end()) throw Error("trace replay: unknown rule '" + ts.rule + "'");
    const auto successors = step(current, *rule_it, constraints, step_options, nullptr);
    const bool want_pre_blur = ts.stage == std::string(stage_name(PipelineStage::PostCoerce));
    bool found = false;
    for (const StepSuccessor& succ : successors) {
      const LogicalStructure& candidate = want_pre_blur ? succ.pre_blur : succ.shape;
      if (candidate.to_text("step") == ts.structure_text) {
        current = candidate;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error("trace replay: step via '" + ts.rule + "' did not reproduce the recorded shape");
  }
  return current;
}

// ---------------------------------------------------------------------------
// Concrete oracle
// ---------------------------------------------------------------------------

ConcreteResult concrete_explore(const Graph& start, const std::vector<GraphRule>& rules,
                                const std::vector<ForbiddenPattern>& patterns,
                                const SignaturePtr& sig, std::size_t bound) {
  if (bound == 0) throw Error("concrete exploration requires a positive bound");
  ConcreteResult result;

  struct Known {
    Graph graph;
    LogicalStructure encoded;
  };
  std::vector<Known> known;
  std::deque<std::size_t> frontier;

  auto is_known = [&](const LogicalStructure& encoded) {
    // Both directions of a 2-valued embedding force a bijection with equal
    // values, so one search is an isomorphism test.
    for (const Known& k : known) {
      if (k.encoded.universe().size() != encoded.universe().size()) continue;
      if (find_embedding(encoded, k.encoded)) return true;
    }
    return false;
  };

  auto matches_pattern = [&](const LogicalStructure& encoded, std::string& hit) {
    for (const ForbiddenPattern& p : patterns) {
      const GraphRule as_rule(p.name, p.graph, p.graph);
      for (const Matching& m : find_matchings(encoded, as_rule)) {
        if (m.value == TruthValue::True) {
          hit = p.name;
          return true;
        }
      }
    }
    return false;
  };

  LogicalStructure first = encode_graph(start, sig);
  std::string hit;
  if (matches_pattern(first, hit)) {
    result.reached.push_back(start);
    result.matched_pattern = hit;
    result.verdict = Verdict::Unsafe;
    return result;
  }
  known.push_back({start, std::move(first)});
  frontier.push_back(0);
  result.reached.push_back(start);

  while (!frontier.empty()) {
    const std::size_t index = frontier.front();
    frontier.pop_front();
    const Graph current = known[index].graph;
    for (const GraphRule& rule : rules) {
      const LogicalStructure encoded = encode_graph(current, sig);
      for (const Matching& m : find_matchings(encoded, rule)) {
        if (m.value != TruthValue::True) continue;
        Graph next = apply_concrete(current, rule, m.assignment);
        LogicalStructure next_encoded = encode_graph(next, sig);
        if (is_known(next_encoded)) continue;
        std::string pattern_hit_name;
        if (matches_pattern(next_encoded, pattern_hit_name)) {
          result.reached.push_back(next);
          result.matched_pattern = pattern_hit_name;
          result.verdict = Verdict::Unsafe;
          return result;
        }
        if (known.size() >= bound) {
          result.bound_exhausted = true;
          result.verdict = Verdict::BoundExceeded;
          return result;
        }
        known.push_back({next, std::move(next_encoded)});
        frontier.push_back(known.size() - 1);
        result.reached.push_back(std::move(next));
      }
    }
  }
  result.verdict = Verdict::Safe;
  return result;
}

} // namespace gts
