#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gts/engine.hpp"
#include "gts/rules.hpp"
#include "gts/structure.hpp"

namespace gts {

/// A self-contained model: predicate declarations, instrumentation with
/// meaning formulas, hand-written compatibility constraints, named
/// structures (exactly one called `start`), shape rules and forbidden
/// patterns.
struct ModelFile {
  SignaturePtr signature;
  std::vector<std::string> structure_order;
  std::map<std::string, LogicalStructure> structures;
  std::vector<ShapeRule> rules;
  std::vector<ForbiddenPattern> patterns;
  ConstraintList hand_constraints;
  std::vector<std::string> warnings; // defaulted updates etc.

  const LogicalStructure& start() const;
  const LogicalStructure& structure(const std::string& name) const;
  /// Derived instrumentation constraints followed by the hand-written ones.
  ConstraintList all_constraints() const;
};

ModelFile load_model(const std::filesystem::path& path);
ModelFile load_model_text(std::string_view text, const std::string& origin = "<text>");

/// Multi-file layout: predicates.gts, start.gts, rules.gts, patterns.gts in
/// one directory, concatenated in that order.
ModelFile load_model_split(const std::filesystem::path& dir);

/// Canonical text; load_model_text(print_model(m)) reproduces the model.
std::string print_model(const ModelFile& model);

} // namespace gts
