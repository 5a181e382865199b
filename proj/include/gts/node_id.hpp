#pragma once

#include <compare>
#include <map>
#include <string>

namespace gts {

/// Name of a node in a graph or of an element of a structure universe.
/// Kept as an explicit type so node names, predicate names and variable
/// names do not mix silently.
class NodeId {
public:
  NodeId() = default;
  explicit NodeId(std::string name) : name_(std::move(name)) {}

  const std::string& str() const { return name_; }

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;

private:
  std::string name_;
};

/// Variable assignment used when evaluating a formula: variable name -> node.
using Assignment = std::map<std::string, NodeId>;

/// Total map between universes (embedding witnesses, concrete matchings).
using NodeMap = std::map<NodeId, NodeId>;

} // namespace gts
