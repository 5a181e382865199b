#include "gts/driver.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "gts/dot.hpp"
#include "gts/error.hpp"
#include "gts/log.hpp"

namespace gts {

namespace {

int verdict_exit_code(Verdict verdict) {
  switch (verdict) {
  case Verdict::Safe: return 0;
  case Verdict::Unsafe: return 1;
  case Verdict::BoundExceeded: return 2;
  }
  return 3;
}

nlohmann::json stats_to_json(const EngineStats& stats, bool deterministic) {
  nlohmann::json j;
  j["intermediate_structures"] = stats.intermediate_structures;
  j["maximal_set_size"] = stats.maximal_set_size;
  if (!deterministic) j["wall_seconds"] = stats.wall_seconds;
  return j;
}

StageSink make_dot_sink(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto counter = std::make_shared<std::size_t>(0);
  return [dir, counter](PipelineStage stage, const LogicalStructure& s) {
    std::ostringstream name;
    name << "stage_" << std::setw(5) << std::setfill('0') << (*counter)++ << "_"
         << stage_name(stage) << ".dot";
    std::ofstream out(dir / name.str());
    out << render_dot(s, name.str());
  };
}

void dump_reachable(const std::filesystem::path& dir,
                    const std::vector<std::shared_ptr<const LogicalStructure>>& shapes) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    std::ostringstream name;
    name << "reach_" << std::setw(3) << std::setfill('0') << i;
    std::ofstream out(dir / (name.str() + ".dot"));
    out << render_dot(*shapes[i], name.str());
  }
}

} // namespace

nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& step : trace.steps) {
    nlohmann::json assignment;
    for (const auto& [var, node] : step.applied_at) assignment[var] = node.str();
    steps.push_back({{"rule", step.rule},
                     {"assignment", assignment},
                     {"stage", step.stage},
                     {"structure", step.structure_text}});
  }
  return {{"steps", steps}, {"pattern", trace.pattern}, {"offending", trace.offending_text}};
}

Trace trace_from_json(const nlohmann::json& j) {
  Trace trace;
  trace.pattern = j.at("pattern").get<std::string>();
  trace.offending_text = j.at("offending").get<std::string>();
  for (const nlohmann::json& step : j.at("steps")) {
    TraceStep ts;
    ts.rule = step.at("rule").get<std::string>();
    ts.stage = step.at("stage").get<std::string>();
    ts.structure_text = step.at("structure").get<std::string>();
    for (const auto& [var, node] : step.at("assignment").items())
      ts.applied_at[var] = NodeId(node.get<std::string>());
    trace.steps.push_back(std::move(ts));
  }
  return trace;
}

DriverOutcome run_analyze(const ModelFile& model, const std::string& model_name,
                          const AnalyzeFlags& flags) {
  ExploreLimits limits;
  limits.max_structures = flags.max_structures;
  limits.max_seconds = flags.max_seconds;

  ExploreOptions options;
  options.blur = flags.blur;
  options.eager_check = flags.eager_check;
  options.deterministic = flags.deterministic;
  options.jobs = flags.jobs;
  options.check_mat_focus = flags.check_mat_focus;
  if (flags.dot_dir) options.sink = make_dot_sink(*flags.dot_dir / "stages");

  const AnalysisResult result =
      explore(model.start(), model.rules, model.patterns, model.all_constraints(), limits, options);

  DriverOutcome outcome;
  outcome.verdict = result.verdict;
  outcome.exit_code = verdict_exit_code(result.verdict);

  nlohmann::json report;
  report["schema"] = kReportSchema;
  report["command"] = "analyze";
  report["model"] = model_name;
  report["verdict"] = std::string(verdict_name(result.verdict));
  report["statistics"] = stats_to_json(result.stats, flags.deterministic);
  nlohmann::json reachable = nlohmann::json::array();
  for (std::size_t i = 0; i < result.reachable.size(); ++i)
    reachable.push_back(result.reachable[i]->to_text("shape_" + std::to_string(i)));
  report["reachable"] = reachable;
  report["warnings"] = model.warnings;
  if (result.trace) report["trace"] = trace_to_json(*result.trace);
  outcome.report = std::move(report);

  if (flags.dot_dir) dump_reachable(*flags.dot_dir, result.reachable);

  log_info("analyze ", model_name, ": ", verdict_name(result.verdict), ", ",
           result.stats.intermediate_structures, " intermediates, ", result.reachable.size(),
           " maximal shapes");
  return outcome;
}

DriverOutcome run_concrete(const ModelFile& model, const std::string& model_name,
                           const ConcreteFlags& flags) {
  if (flags.bound == 0) throw Error("concrete exploration requires --bound > 0");
  const LogicalStructure& start = model.structure(flags.structure_name);
  if (!start.is_two_valued())
    throw ModelError("structure '" + flags.structure_name + "' is not 2-valued");
  const Graph start_graph = decode_structure(start);

  std::vector<GraphRule> rules;
  for (const ShapeRule& rule : model.rules) rules.push_back(rule.rule());

  const ConcreteResult result =
      concrete_explore(start_graph, rules, model.patterns, model.signature, flags.bound);

  DriverOutcome outcome;
  outcome.verdict = result.verdict;
  outcome.exit_code = verdict_exit_code(result.verdict);

  nlohmann::json report;
  report["schema"] = kReportSchema;
  report["command"] = "concrete";
  report["model"] = model_name;
  report["verdict"] = std::string(verdict_name(result.verdict));
  report["reached_count"] = result.reached.size();
  report["bound_exhausted"] = result.bound_exhausted;
  if (result.matched_pattern) report["matched_pattern"] = *result.matched_pattern;
  nlohmann::json graphs = nlohmann::json::array();
  for (std::size_t i = 0; i < result.reached.size(); ++i) {
    const LogicalStructure encoded = encode_graph(result.reached[i], model.signature);
    graphs.push_back(encoded.to_text("graph_" + std::to_string(i)));
  }
  report["graphs"] = graphs;
  outcome.report = std::move(report);

  if (flags.dot_dir) {
    std::filesystem::create_directories(*flags.dot_dir);
    for (std::size_t i = 0; i < result.reached.size(); ++i) {
      std::ostringstream name;
      name << "graph_" << std::setw(3) << std::setfill('0') << i;
      std::ofstream out(*flags.dot_dir / (name.str() + ".dot"));
      out << render_dot(encode_graph(result.reached[i], model.signature), name.str());
    }
  }
  return outcome;
}

} // namespace gts
