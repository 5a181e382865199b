#include "gts/dot.hpp"

#include <sstream>

namespace gts {

namespace {

// Node ids come from the identifier grammar, so quoting is the only concern.
std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

} // namespace

std::string render_dot(const LogicalStructure& s, std::string_view name) {
  const PredicateSignature& sig = s.signature();
  std::ostringstream os;
  os << "digraph \"" << escape(std::string(name)) << "\" {\n";
  os << "  node [shape=box];\n";

  std::vector<std::string> unary_preds = sig.unary_order();
  unary_preds.pop_back(); // sm shown via the dashed border

  for (const NodeId& u : s.universe()) {
    std::string label = u.str();
    for (const std::string& pred : unary_preds) {
      const TruthValue v = s.value(pred, u);
      if (v == TruthValue::True)
        label += "\\n" + pred;
      else if (v == TruthValue::Maybe)
        label += "\\n" + pred + "?";
    }
    os << "  \"" << escape(u.str()) << "\" [label=\"" << escape(label) << "\"";
    if (s.is_summary(u)) os << ", style=dashed";
    os << "];\n";
  }

  for (const std::string& pred : sig.binary_core()) {
    for (const NodeId& a : s.universe()) {
      for (const NodeId& b : s.universe()) {
        const TruthValue v = s.value(pred, a, b);
        if (v == TruthValue::False) continue;
        os << "  \"" << escape(a.str()) << "\" -> \"" << escape(b.str()) << "\" [label=\"" << pred
           << "\"";
        if (v == TruthValue::Maybe) os << ", style=dashed";
        os << "];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

} // namespace gts
