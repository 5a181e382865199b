#pragma once

#include <string>
#include <string_view>

#include "gts/structure.hpp"

namespace gts {

/// Deterministic DOT rendering: one rectangle per node (dashed when the node
/// is a summary), unary predicates with value 1 in the label and value 1/2 as
/// `p?`, solid edges for definite binary values and dashed edges for 1/2.
std::string render_dot(const LogicalStructure& s, std::string_view name);

} // namespace gts
