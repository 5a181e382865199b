#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "gts/engine.hpp"
#include "gts/model.hpp"

namespace gts {

inline constexpr std::string_view kReportSchema = "gtshape-report/1";

struct AnalyzeFlags {
  std::size_t max_structures = 1000000;
  double max_seconds = 600.0;
  bool blur = true;
  bool eager_check = false;
  bool deterministic = false;
  int jobs = 1;
  bool check_mat_focus = false;
  std::optional<std::filesystem::path> dot_dir;
};

struct ConcreteFlags {
  std::size_t bound = 0;
  std::string structure_name = "start";
  std::optional<std::filesystem::path> dot_dir;
};

struct DriverOutcome {
  int exit_code = 0;
  Verdict verdict = Verdict::Safe;
  nlohmann::json report;
};

/// Runs the shape analysis and builds the JSON report. Exit code 0 = SAFE,
/// 1 = UNSAFE, 2 = BOUND_EXCEEDED. With `deterministic` the report is
/// byte-stable across runs (no wall time, sequential exploration).
DriverOutcome run_analyze(const ModelFile& model, const std::string& model_name,
                          const AnalyzeFlags& flags);

/// Bounded concrete exploration of a 2-valued start graph.
DriverOutcome run_concrete(const ModelFile& model, const std::string& model_name,
                           const ConcreteFlags& flags);

nlohmann::json trace_to_json(const Trace& trace);
Trace trace_from_json(const nlohmann::json& j);

} // namespace gts
