// Acceptance suite: one binary, one pass/fail line per criterion.
// Exit code = number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "gts/driver.hpp"
#include "gts/engine.hpp"
#include "gts/model.hpp"
#include "support/generators.hpp"

using namespace gts;
using namespace gts::testing;

namespace {

const std::string kModelsDir = GTS_MODELS_DIR;

struct Criterion {
  int number;
  std::string name;
  std::function<std::string()> run; // returns detail text, throws on failure

  bool execute() const {
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::string detail = run();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("[PASS] criterion %d: %s (%s, %.2fs)\n", number, name.c_str(), detail.c_str(),
                  secs);
      return true;
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %d: %s: %s\n", number, name.c_str(), e.what());
      return false;
    }
  }
};

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

// ---------------------------------------------------------------------------
// 1. Railcab regression: SAFE, < 10 s, maximal set within [5, 50].
// ---------------------------------------------------------------------------
std::string railcab_regression() {
  const ModelFile model = load_model(kModelsDir + "/railcab.gts");
  ExploreOptions options;
  options.deterministic = true;
  options.check_mat_focus = true; // feeds criterion 3a
  ExploreLimits limits;
  limits.max_seconds = 10.0;

  const auto start = std::chrono::steady_clock::now();
  const AnalysisResult result =
      explore(model.start(), model.rules, model.patterns, model.all_constraints(), limits, options);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  require(result.verdict == Verdict::Safe, "expected SAFE, got " +
                                               std::string(verdict_name(result.verdict)));
  require(secs < 10.0, "took too long");
  require(result.reachable.size() >= 5 && result.reachable.size() <= 50,
          "maximal set size " + std::to_string(result.reachable.size()) + " outside [5, 50]");

  std::ostringstream detail;
  detail << "SAFE, " << result.reachable.size() << " maximal, "
         << result.stats.intermediate_structures
         << " intermediates; published reference: ~250ms, 108 intermediates, 17 maximal";
  return detail.str();
}

// ---------------------------------------------------------------------------
// 2. Soundness oracle: every bounded concrete reach graph embeds into the
//    shape reach set. 3a rides along: materialisation asserts stay on.
// ---------------------------------------------------------------------------
std::string soundness_oracle() {
  std::ostringstream detail;
  int models = 0;
  for (const char* name : {"ring2.gts", "shuttle.gts", "tokens.gts", "collision.gts"}) {
    const ModelFile model = load_model(kModelsDir + "/" + name);
    std::vector<GraphRule> rules;
    for (const ShapeRule& r : model.rules) rules.push_back(r.rule());

    // patterns stripped on both sides: the comparison is about reachability
    const ConcreteResult concrete =
        concrete_explore(decode_structure(model.start()), rules, {}, model.signature, 200);
    require(concrete.verdict == Verdict::Safe, std::string(name) + ": oracle hit the bound");
    require(concrete.reached.size() <= 200, std::string(name) + ": too many graphs");

    ExploreOptions options;
    options.deterministic = true;
    options.check_mat_focus = true; // criterion 3a
    const AnalysisResult abstract =
        explore(model.start(), model.rules, {}, model.all_constraints(), {}, options);
    require(abstract.verdict == Verdict::Safe, std::string(name) + ": shape analysis not SAFE");

    for (const Graph& g : concrete.reached) {
      const LogicalStructure encoded = encode_graph(g, model.signature);
      bool covered = false;
      for (const auto& shape : abstract.reachable)
        if (embeds(encoded, *shape)) {
          covered = true;
          break;
        }
      require(covered, std::string(name) + ": a reachable graph is not covered");
    }
    detail << name << " " << concrete.reached.size() << "->" << abstract.reachable.size() << "  ";
    ++models;
  }
  require(models >= 3, "fewer than 3 oracle models");
  return "concrete reach covered in " + std::to_string(models) + " models: " + detail.str();
}

// ---------------------------------------------------------------------------
// 3. Materialisation theorem. (a) ran inside criteria 1 and 2 via
//    check_mat_focus; (b) sampled focus-into-mat embedding.
// ---------------------------------------------------------------------------
std::string mat_focus_sampled() {
  Rng rng(101);
  int triples = 0;
  int with_instr = 0;
  for (int iter = 0; triples < 500; ++iter) {
    require(iter < 200000, "sample generation exhausted");
    const bool instrumented = chance(rng, 0.3);
    const SignaturePtr sig = instrumented ? small_signature_with_instr(rng) : small_signature();
    const LogicalStructure shape = random_shape(rng, sig, 3);
    const GraphRule rule = random_rule(rng, sig, false);

    const Concretization conc = concretize(rng, shape, 2);
    if (conc.graph.nodes().size() > 5) continue;
    const LogicalStructure encoded = encode_graph(conc.graph, sig);
    if (!check_embedding(encoded, shape, conc.witness)) continue; // instrumentation mismatch

    // the rule must apply exactly on the concretisation
    const auto matchings = find_matchings(encoded, rule);
    bool applies = false;
    for (const Matching& m : matchings)
      if (m.value == TruthValue::True) applies = true;
    if (!applies) continue;

    bool covered = false;
    for (const LogicalStructure& mat : materialisations(shape, rule))
      if (embeds(encoded, mat)) {
        covered = true;
        break;
      }
    require(covered, "a concretisation escapes every materialisation");
    ++triples;
    if (instrumented) ++with_instr;
  }
  return std::to_string(triples) + " triples, " + std::to_string(with_instr) +
         " with instrumentation, 0 violations (assert-mode ran in criteria 1 and 2)";
}

// ---------------------------------------------------------------------------
// 4. Pattern soundness: check_pattern false implies no concretisation
//    matches the pattern.
// ---------------------------------------------------------------------------
std::string pattern_soundness() {
  Rng rng(103);
  int pairs = 0;
  long samples = 0;
  for (int iter = 0; pairs < 500; ++iter) {
    require(iter < 200000, "sample generation exhausted");
    const bool instrumented = chance(rng, 0.3);
    const SignaturePtr sig = instrumented ? small_signature_with_instr(rng) : small_signature();
    const LogicalStructure shape = random_shape(rng, sig, 3);
    const ForbiddenPattern pattern = random_pattern(rng, sig);
    const ConstraintList constraints = derive_constraints(*sig);

    if (check_pattern(shape, pattern, constraints)) continue;
    ++pairs;

    const GraphRule as_rule(pattern.name, pattern.graph, pattern.graph);
    for (int k = 0; k < 50; ++k) {
      const auto graph = consistent_concretization(rng, shape, 2);
      if (!graph || graph->nodes().size() > 5) continue;
      const LogicalStructure encoded = encode_graph(*graph, sig);
      for (const Matching& m : find_matchings(encoded, as_rule))
        require(m.value != TruthValue::True,
                "a concretisation matches a pattern reported absent");
      ++samples;
    }
  }
  return std::to_string(pairs) + " shape/pattern pairs, " + std::to_string(samples) +
         " concretisations, 0 violations";
}

// ---------------------------------------------------------------------------
// 5. Logic suite: exhaustive 3-valued properties plus sampled embedding
//    monotonicity of evaluation.
// ---------------------------------------------------------------------------
std::string logic_suite() {
  const TruthValue all[] = {TruthValue::False, TruthValue::Maybe, TruthValue::True};

  for (TruthValue a : all) {
    require(info_le(a, a) && logical_le(a, a), "reflexivity");
    require(conj(a, a) == a && disj(a, a) == a, "idempotence");
    for (TruthValue b : all) {
      require(conj(a, b) == conj(b, a) && disj(a, b) == disj(b, a), "commutativity");
      require(neg(conj(a, b)) == disj(neg(a), neg(b)), "De Morgan");
      require(neg(disj(a, b)) == conj(neg(a), neg(b)), "De Morgan");
      if (info_le(a, b) && info_le(b, a)) require(a == b, "antisymmetry");
      if (logical_le(a, b) && logical_le(b, a)) require(a == b, "antisymmetry");
      const TruthValue j = info_join(a, b);
      require(info_le(a, j) && info_le(b, j), "join upper bound");
      for (TruthValue u : all)
        if (info_le(a, u) && info_le(b, u)) require(info_le(j, u), "join minimality");
      for (TruthValue c : all) {
        require(conj(conj(a, b), c) == conj(a, conj(b, c)), "associativity");
        require(disj(disj(a, b), c) == disj(a, disj(b, c)), "associativity");
        if (info_le(a, b) && info_le(b, c)) require(info_le(a, c), "transitivity");
        if (logical_le(a, b) && logical_le(b, c)) require(logical_le(a, c), "transitivity");
      }
    }
  }
  for (TruthValue a : all)
    for (TruthValue a2 : all) {
      if (!info_le(a, a2)) continue;
      require(info_le(neg(a), neg(a2)), "negation monotone");
      for (TruthValue b : all)
        for (TruthValue b2 : all) {
          if (!info_le(b, b2)) continue;
          require(info_le(conj(a, b), conj(a2, b2)), "conjunction monotone");
          require(info_le(disj(a, b), disj(a2, b2)), "disjunction monotone");
        }
    }

  Rng rng(105);
  const SignaturePtr sig = small_signature();
  int instances = 0;
  while (instances < 1000) {
    const LogicalStructure abstract = random_shape(rng, sig, 3);
    const Concretization conc = concretize(rng, abstract, 2);
    const LogicalStructure refined = encode_graph(conc.graph, sig);
    if (!check_embedding(refined, abstract, conc.witness)) continue;
    const Formula f = random_formula(rng, sig, {"x", "y"}, 3);
    Assignment m;
    const auto& u = refined.universe();
    m["x"] = u[pick(rng, 0, static_cast<int>(u.size()) - 1)];
    m["y"] = u[pick(rng, 0, static_cast<int>(u.size()) - 1)];
    Assignment mapped;
    for (const auto& [var, node] : m) mapped[var] = conc.witness.at(node);
    require(info_le(evaluate(f, refined, m), evaluate(f, abstract, mapped)),
            "evaluation not embedding-monotone");
    ++instances;
  }
  return "3^k tables exhaustive, " + std::to_string(instances) + " monotonicity instances";
}

// ---------------------------------------------------------------------------
// 6. Concrete/shape agreement: with blur disabled and no instrumentation the
//    pipeline equals encode(apply_concrete(...)).
// ---------------------------------------------------------------------------
std::string concrete_shape_agreement() {
  Rng rng(107);
  const SignaturePtr sig = small_signature();
  int applications = 0;
  while (applications < 200) {
    const LogicalStructure s = random_concrete_structure(rng, sig, 4);
    const Graph g = decode_structure(s);
    const GraphRule rule = random_rule(rng, sig);
    const auto matchings = find_matchings(s, rule);
    if (matchings.empty()) continue;

    std::set<std::string> expected;
    for (const Matching& m : matchings) {
      require(m.value == TruthValue::True, "2-valued matching must be definite");
      expected.insert(encode_graph(apply_concrete(g, rule, m.assignment), sig).canonical_key());
    }

    StepOptions options;
    options.blur = false;
    options.check_mat_focus = true;
    std::set<std::string> produced;
    for (const StepSuccessor& succ : step(s, ShapeRule{rule}, {}, options))
      produced.insert(succ.shape.canonical_key());

    require(produced == expected, "pipeline and concrete results differ");
    applications += static_cast<int>(matchings.size());
  }
  return std::to_string(applications) + " applications, exact agreement";
}

// ---------------------------------------------------------------------------
// 7. Termination with a node-creating rule under blurring.
// ---------------------------------------------------------------------------
std::string creation_terminates() {
  const ModelFile model = load_model(kModelsDir + "/passengers.gts");
  bool creates = false;
  for (const ShapeRule& rule : model.rules)
    if (!rule.rule().created_nodes().empty()) creates = true;
  require(creates, "model has no node-creating rule");

  const AnalysisResult result =
      explore(model.start(), model.rules, model.patterns, model.all_constraints());
  require(result.verdict != Verdict::BoundExceeded, "hit a bound");
  return std::string(verdict_name(result.verdict)) + " after " +
         std::to_string(result.stats.intermediate_structures) + " intermediates, " +
         std::to_string(result.reachable.size()) + " maximal";
}

// ---------------------------------------------------------------------------
// 8. CLI round-trips: model print identity, byte-stable deterministic
//    reports, trace replay.
// ---------------------------------------------------------------------------
std::string cli_round_trips() {
  int models = 0;
  for (const char* name : {"railcab.gts", "ring2.gts", "shuttle.gts", "tokens.gts",
                           "passengers.gts", "collision.gts"}) {
    const ModelFile model = load_model(kModelsDir + "/" + name);
    const std::string printed = print_model(model);
    const ModelFile reloaded = load_model_text(printed, name);
    require(print_model(reloaded) == printed, std::string(name) + ": print not idempotent");
    require(reloaded.start() == model.start(), std::string(name) + ": start shape changed");
    ++models;
  }

  AnalyzeFlags flags;
  flags.deterministic = true;
  const ModelFile railcab = load_model(kModelsDir + "/railcab.gts");
  const std::string r1 = run_analyze(railcab, "railcab.gts", flags).report.dump(2);
  const std::string r2 = run_analyze(railcab, "railcab.gts", flags).report.dump(2);
  const std::string r3 = run_analyze(railcab, "railcab.gts", flags).report.dump(2);
  require(r1 == r2 && r2 == r3, "deterministic reports differ across runs");

  const ModelFile collision = load_model(kModelsDir + "/collision.gts");
  const DriverOutcome outcome = run_analyze(collision, "collision.gts", flags);
  require(outcome.exit_code == 1, "collision model should be UNSAFE");
  const Trace trace = trace_from_json(outcome.report.at("trace"));
  const LogicalStructure replayed =
      replay_trace(collision.start(), collision.rules, collision.all_constraints(), trace);
  require(replayed.to_text("offending") == trace.offending_text,
          "trace replay did not reproduce the flagged structure");

  return std::to_string(models) + " model round-trips, byte-stable report, trace replayed";
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "railcab regression", railcab_regression},
      {2, "soundness oracle", soundness_oracle},
      {3, "materialisation theorem (assert-mode + sampled)", mat_focus_sampled},
      {4, "pattern soundness", pattern_soundness},
      {5, "logic suite", logic_suite},
      {6, "concrete/shape agreement", concrete_shape_agreement},
      {7, "termination with node creation", creation_terminates},
      {8, "CLI round-trips", cli_round_trips},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria)
    if (!criterion.execute()) ++failed;

  if (failed == 0)
    std::printf("all %zu criteria passed\n", criteria.size());
  else
    std::printf("%d criteria FAILED\n", failed);
  return failed;
}
