#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gts/dot.hpp"
#include "gts/driver.hpp"
#include "gts/error.hpp"
#include "gts/model.hpp"

namespace {

void write_report(const nlohmann::json& report, const std::string& path) {
  if (path == "-") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw gts::Error("cannot write JSON report to '" + path + "'");
  out << report.dump(2) << "\n";
}

gts::ModelFile load(const std::string& model_arg, bool split) {
  return split ? gts::load_model_split(model_arg) : gts::load_model(model_arg);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape analysis for graph transformation systems"};
  app.require_subcommand(1);

  std::string model_path;
  bool split = false;
  std::string json_path;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute the reachable shape set and check patterns");
  gts::AnalyzeFlags analyze_flags;
  bool no_blur = false;
  std::string dot_dir;
  analyze->add_option("model", model_path, "model file")->required();
  analyze->add_flag("--split", split, "treat the model argument as a multi-file directory");
  analyze->add_option("--max-structures", analyze_flags.max_structures,
                      "abort after this many intermediate structures");
  analyze->add_option("--max-seconds", analyze_flags.max_seconds, "wall-clock limit");
  analyze->add_flag("--no-blur", no_blur, "disable canonical abstraction after each step");
  analyze->add_flag("--eager-check", analyze_flags.eager_check,
                    "also check patterns before blurring");
  analyze->add_flag("--deterministic", analyze_flags.deterministic,
                    "sequential exploration, byte-stable report");
  analyze->add_option("--jobs", analyze_flags.jobs, "parallel step workers");
  analyze->add_flag("--check-mat-focus", analyze_flags.check_mat_focus,
                    "assert every materialisation embeds into its origin");
  analyze->add_option("--dot", dot_dir, "dump DOT files into this directory");
  analyze->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");

  // concrete
  auto* concrete = app.add_subcommand("concrete", "Bounded concrete exploration (oracle)");
  gts::ConcreteFlags concrete_flags;
  std::string concrete_dot;
  concrete->add_option("model", model_path, "model file")->required();
  concrete->add_flag("--split", split, "treat the model argument as a multi-file directory");
  concrete->add_option("--bound", concrete_flags.bound, "maximum number of distinct graphs")
      ->required();
  concrete->add_option("--structure", concrete_flags.structure_name,
                       "2-valued start structure (default: start)");
  concrete->add_option("--dot", concrete_dot, "dump DOT files into this directory");
  concrete->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");

  // dot
  auto* dot = app.add_subcommand("dot", "Render one structure as DOT");
  std::string dot_structure = "start";
  std::string dot_output = "-";
  dot->add_option("model", model_path, "model file")->required();
  dot->add_flag("--split", split, "treat the model argument as a multi-file directory");
  dot->add_option("--structure", dot_structure, "structure name (default: start)");
  dot->add_option("-o,--output", dot_output, "output file ('-' for stdout)");

  // print
  auto* print = app.add_subcommand("print", "Parse a model and print its canonical form");
  print->add_option("model", model_path, "model file")->required();
  print->add_flag("--split", split, "treat the model argument as a multi-file directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    if (analyze->parsed()) {
      analyze_flags.blur = !no_blur;
      if (!dot_dir.empty()) analyze_flags.dot_dir = dot_dir;
      const gts::ModelFile model = load(model_path, split);
      const gts::DriverOutcome outcome = gts::run_analyze(model, model_path, analyze_flags);
      if (json_path != "-") {
        const auto& stats = outcome.report.at("statistics");
        std::cout << "verdict " << gts::verdict_name(outcome.verdict) << " (maximal set "
                  << stats.at("maximal_set_size").get<std::size_t>() << ", intermediates "
                  << stats.at("intermediate_structures").get<std::size_t>() << ")\n";
      }
      if (!json_path.empty()) write_report(outcome.report, json_path);
      return outcome.exit_code;
    }
    if (concrete->parsed()) {
      if (!concrete_dot.empty()) concrete_flags.dot_dir = concrete_dot;
      const gts::ModelFile model = load(model_path, split);
      const gts::DriverOutcome outcome = gts::run_concrete(model, model_path, concrete_flags);
      if (json_path != "-")
        std::cout << "verdict " << gts::verdict_name(outcome.verdict) << " ("
                  << outcome.report.at("reached_count").get<std::size_t>() << " graphs)\n";
      if (!json_path.empty()) write_report(outcome.report, json_path);
      return outcome.exit_code;
    }
    if (dot->parsed()) {
      const gts::ModelFile model = load(model_path, split);
      const std::string rendered = gts::render_dot(model.structure(dot_structure), dot_structure);
      if (dot_output == "-") {
        std::cout << rendered;
      } else {
        std::ofstream out(dot_output);
        if (!out) throw gts::Error("cannot write '" + dot_output + "'");
        out << rendered;
      }
      return 0;
    }
    if (print->parsed()) {
      const gts::ModelFile model = load(model_path, split);
      std::cout << gts::print_model(model);
      return 0;
    }
  } catch (const gts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 3;
}
