#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gts/rules.hpp"
#include "gts/structure.hpp"

namespace gts {

/// Coercion constraint: whenever `body` evaluates definitely true under some
/// assignment, the head atom must hold with the given polarity. A 1/2 head is
/// sharpened; a definite contradiction discards the structure.
class CompatibilityConstraint {
public:
  CompatibilityConstraint(Formula body, bool head_negated, std::string head_pred,
                          std::vector<std::string> head_vars);

  const Formula& body() const { return body_; }
  bool head_negated() const { return head_negated_; }
  const std::string& head_pred() const { return head_pred_; }
  const std::vector<std::string>& head_vars() const { return head_vars_; }

  void check(const PredicateSignature& sig) const;
  std::string to_text() const;

private:
  Formula body_;
  bool head_negated_;
  std::string head_pred_;
  std::vector<std::string> head_vars_;
};

using ConstraintList = std::vector<CompatibilityConstraint>;

/// For every instrumentation predicate p with meaning formula a_p(v), the two
/// constraints  a_p(v) => p(v)  and  !a_p(v) => !p(v).
ConstraintList derive_constraints(const PredicateSignature& sig);

/// Summary nodes hit by the matching: m(N_L) intersected with the summaries.
std::set<NodeId> summary_targets(const LogicalStructure& s, const GraphRule& rule,
                                 const Assignment& m);

/// Materialisation of one potential matching (production formula value 1/2):
/// the L-node names become fresh concrete nodes carrying the left-hand side
/// definitely, all other values are inherited from the matched originals, and
/// the summary originals listed in `keep` survive next to their copies.
LogicalStructure materialise(const LogicalStructure& s, const GraphRule& rule,
                             const Assignment& m, const std::set<NodeId>& keep);

/// The full materialisation set: the structure itself when some matching is
/// definite, plus materialise(s, rule, m, I) for every potential matching m
/// and every subset I of its summary targets. Deduplicated.
std::vector<LogicalStructure> materialisations(const LogicalStructure& s, const GraphRule& rule);

/// Fixpoint sharpening: for every constraint and assignment with a definite
/// body, a 1/2 head value is sharpened to the head polarity; a definite
/// opposite head discards the structure (returns nullopt).
std::optional<LogicalStructure> coerce(const LogicalStructure& s, const ConstraintList& constraints);

struct EngineStats {
  std::size_t intermediate_structures = 0;
  std::size_t maximal_set_size = 0;
  double wall_seconds = 0.0;
};

enum class PipelineStage { Materialise, Coerce, Apply, PostCoerce, Blur };
std::string_view stage_name(PipelineStage stage);

/// Observer for --dot style dumps; receives every structure a pipeline stage
/// produces.
using StageSink = std::function<void(PipelineStage, const LogicalStructure&)>;

struct StepOptions {
  bool blur = true;
  bool check_mat_focus = false; // assert mat(S) subset-of focus(S) per element
  StageSink sink;               // optional
};

struct StepSuccessor {
  LogicalStructure shape;      // final (blurred when enabled)
  LogicalStructure pre_blur;   // after the post-application coerce
  std::string rule;
  Assignment applied_at;
};

/// One shape-level transition: materialise, coerce, apply at every definite
/// matching, coerce again, blur. Successors are deduplicated and ordered by
/// canonical key.
std::vector<StepSuccessor> step(const LogicalStructure& s, const ShapeRule& rule,
                                const ConstraintList& constraints, const StepOptions& options,
                                EngineStats* stats = nullptr);

/// Pattern containment: some assignment makes the pattern formula non-zero
/// and at least one materialisation of <F,F> survives coercion.
bool check_pattern(const LogicalStructure& s, const ForbiddenPattern& pattern,
                   const ConstraintList& constraints);

struct TraceStep {
  std::string rule;
  Assignment applied_at;
  std::string stage;
  std::string structure_text; // canonical text of the produced structure
};

struct Trace {
  std::vector<TraceStep> steps;
  std::string pattern;
  std::string offending_text;
};

enum class Verdict { Safe, Unsafe, BoundExceeded };
std::string_view verdict_name(Verdict verdict);

struct AnalysisResult {
  Verdict verdict = Verdict::Safe;
  std::vector<std::shared_ptr<const LogicalStructure>> reachable; // maximal set
  std::optional<Trace> trace;                                     // on Unsafe
  EngineStats stats;
};

struct ExploreLimits {
  std::size_t max_structures = std::numeric_limits<std::size_t>::max();
  double max_seconds = std::numeric_limits<double>::infinity();
};

struct ExploreOptions {
  bool blur = true;
  bool eager_check = false; // also check patterns on pre-blur structures
  bool deterministic = false;
  int jobs = 1;
  bool check_mat_focus = false;
  StageSink sink;
};

/// Worklist fixpoint over the antichain of reachable shapes. The start shape
/// must pass coercion. FIFO order, successors sorted by canonical key.
AnalysisResult explore(const LogicalStructure& start, const std::vector<ShapeRule>& rules,
                       const std::vector<ForbiddenPattern>& patterns,
                       const ConstraintList& constraints, const ExploreLimits& limits = {},
                       const ExploreOptions& options = {});

/// Re-runs the pipeline along a trace and checks each recorded structure is
/// reproduced; returns the final structure.
LogicalStructure replay_trace(const LogicalStructure& start, const std::vector<ShapeRule>& rules,
                              const ConstraintList& constraints, const Trace& trace,
                              const ExploreOptions& options = {});

struct ConcreteResult {
  Verdict verdict = Verdict::Safe;
  std::vector<Graph> reached;      // isomorphism-deduplicated
  bool bound_exhausted = false;
  std::optional<std::string> matched_pattern;
};

/// Bounded breadth-first exploration of the concrete graph transformation
/// system; the testing oracle for the soundness theorem.
ConcreteResult concrete_explore(const Graph& start, const std::vector<GraphRule>& rules,
                                const std::vector<ForbiddenPattern>& patterns,
                                const SignaturePtr& sig, std::size_t bound);

} // namespace gts
