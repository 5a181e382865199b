#include <doctest.h>

#include "gts/dot.hpp"
#include "gts/driver.hpp"
#include "gts/model.hpp"

using namespace gts;

namespace {
const std::string kModelsDir = GTS_MODELS_DIR;
}

TEST_CASE("analyze outcomes map to exit codes") {
  AnalyzeFlags flags;
  flags.deterministic = true;

  const ModelFile railcab = load_model(kModelsDir + "/railcab.gts");
  const DriverOutcome safe = run_analyze(railcab, "railcab", flags);
  CHECK(safe.exit_code == 0);
  CHECK(safe.report.at("verdict") == "SAFE");
  CHECK(safe.report.at("schema") == std::string(kReportSchema));

  const ModelFile collision = load_model(kModelsDir + "/collision.gts");
  const DriverOutcome unsafe = run_analyze(collision, "collision", flags);
  CHECK(unsafe.exit_code == 1);
  CHECK(unsafe.report.at("verdict") == "UNSAFE");
  REQUIRE(unsafe.report.contains("trace"));

  AnalyzeFlags bounded = flags;
  bounded.max_structures = 1;
  const DriverOutcome bound = run_analyze(railcab, "railcab", bounded);
  CHECK(bound.exit_code == 2);
  CHECK(bound.report.at("verdict") == "BOUND_EXCEEDED");
}

TEST_CASE("deterministic reports are byte-identical") {
  AnalyzeFlags flags;
  flags.deterministic = true;
  const ModelFile model = load_model(kModelsDir + "/railcab.gts");
  const std::string first = run_analyze(model, "railcab", flags).report.dump(2);
  const std::string second = run_analyze(model, "railcab", flags).report.dump(2);
  const std::string third = run_analyze(model, "railcab", flags).report.dump(2);
  CHECK(first == second);
  CHECK(second == third);
}

TEST_CASE("parallel exploration agrees with the sequential result") {
  const ModelFile model = load_model(kModelsDir + "/railcab.gts");
  AnalyzeFlags sequential;
  sequential.deterministic = true;
  AnalyzeFlags parallel;
  parallel.jobs = 4;
  const DriverOutcome a = run_analyze(model, "railcab", sequential);
  const DriverOutcome b = run_analyze(model, "railcab", parallel);
  CHECK(a.report.at("verdict") == b.report.at("verdict"));
  CHECK(a.report.at("reachable") == b.report.at("reachable"));
}

TEST_CASE("trace serialisation round-trips and replays") {
  AnalyzeFlags flags;
  flags.deterministic = true;
  const ModelFile model = load_model(kModelsDir + "/collision.gts");
  const DriverOutcome outcome = run_analyze(model, "collision", flags);
  REQUIRE(outcome.exit_code == 1);

  const Trace trace = trace_from_json(outcome.report.at("trace"));
  REQUIRE_FALSE(trace.steps.empty());
  CHECK(trace.pattern == "collision");

  const LogicalStructure replayed =
      replay_trace(model.start(), model.rules, model.all_constraints(), trace);
  CHECK(replayed.to_text("offending") == trace.offending_text);
}

TEST_CASE("concrete runs") {
  const ModelFile ring = load_model(kModelsDir + "/ring2.gts");
  ConcreteFlags flags;
  flags.bound = 300;
  const DriverOutcome outcome = run_concrete(ring, "ring2", flags);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.at("reached_count") == 6);

  // the forced-collision model is unsafe concretely as well
  const ModelFile collision = load_model(kModelsDir + "/collision.gts");
  ConcreteFlags small;
  small.bound = 50;
  const DriverOutcome hit = run_concrete(collision, "collision", small);
  CHECK(hit.exit_code == 1);
  CHECK(hit.report.at("matched_pattern") == "collision");

  ConcreteFlags zero;
  zero.bound = 0;
  CHECK_THROWS_AS(run_concrete(ring, "ring2", zero), Error);

  // a 3-valued start structure is rejected
  const ModelFile railcab = load_model(kModelsDir + "/railcab.gts");
  ConcreteFlags some;
  some.bound = 10;
  CHECK_THROWS_AS(run_concrete(railcab, "railcab", some), ModelError);
}

TEST_CASE("dot export conventions") {
  const ModelFile model = load_model(kModelsDir + "/railcab.gts");
  const std::string dot = render_dot(model.start(), "start");
  CHECK(dot.find("digraph \"start\"") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);            // summary node
  CHECK(dot.find("\"rc\" [label=\"rc\\nRC") != std::string::npos); // definite unary in label
  CHECK(dot.find("label=\"next\", style=dashed") != std::string::npos);
  // the definite on-edge is solid: no style attribute after the label
  CHECK(dot.find("\"rc\" -> \"s1\" [label=\"on\"]") != std::string::npos);

  const std::string empty_dot = render_dot(LogicalStructure(model.signature), "empty");
  CHECK(empty_dot.find("digraph \"empty\"") != std::string::npos);

  // 2-valued structures render solid nodes and edges only
  const ModelFile ring = load_model(kModelsDir + "/ring2.gts");
  const std::string solid = render_dot(ring.start(), "ring");
  CHECK(solid.find("style=dashed") == std::string::npos);
}
