#include "gts/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "gts/error.hpp"
#include "gts/log.hpp"

namespace gts {

const LogicalStructure& ModelFile::start() const { return structure("start"); }

const LogicalStructure& ModelFile::structure(const std::string& name) const {
  auto it = structures.find(name);
  if (it == structures.end()) throw ModelError("no structure named '" + name + "'");
  return it->second;
}

ConstraintList ModelFile::all_constraints() const {
  ConstraintList out = derive_constraints(*signature);
  out.insert(out.end(), hand_constraints.begin(), hand_constraints.end());
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Line {
  int number;
  std::string text; // comment-stripped, trimmed
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    ++number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    const auto end = line.find_last_not_of(" \t\r");
    if (begin != std::string::npos)
      lines.push_back({number, line.substr(begin, end - begin + 1)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream is(text);
  std::string word;
  while (is >> word) words.push_back(word);
  return words;
}

bool is_identifier(const std::string& word) {
  if (word.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(word[0])) && word[0] != '_') return false;
  return std::all_of(word.begin(), word.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

[[noreturn]] void fail(const std::string& message, int line) {
  throw ParseError(message, line, 1);
}

// `pred(a)` or `pred(a,b)`; returns (pred, args)
std::pair<std::string, std::vector<std::string>> parse_atom(const std::string& text, int line) {
  const std::size_t open = text.find('(');
  const std::size_t close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    fail("expected predicate atom 'p(a)' or 'p(a,b)', got '" + text + "'", line);
  std::string pred = text.substr(0, open);
  std::string inner = text.substr(open + 1, close - open - 1);
  std::vector<std::string> args;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = inner.find(',', pos);
    std::string arg = inner.substr(pos, comma == std::string::npos ? comma : comma - pos);
    arg.erase(std::remove_if(arg.begin(), arg.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
              arg.end());
    args.push_back(arg);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  pred.erase(std::remove_if(pred.begin(), pred.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             pred.end());
  if (!is_identifier(pred)) fail("bad predicate name '" + pred + "'", line);
  for (const std::string& a : args)
    if (!is_identifier(a)) fail("bad atom argument '" + a + "'", line);
  if (args.empty() || args.size() > 2) fail("atoms take one or two arguments", line);
  return {pred, args};
}

struct SectionParser {
  const std::vector<Line>& lines;
  std::size_t index = 0;

  bool done() const { return index >= lines.size(); }
  const Line& peek() const { return lines[index]; }
  Line take() { return lines[index++]; }
};

class ModelBuilder {
public:
  explicit ModelBuilder(const std::string& origin) : origin_(origin) {}

  ModelFile build(const std::vector<Line>& all_lines) {
    SectionParser p{all_lines};
    auto sig = std::make_shared<PredicateSignature>();
    bool sig_frozen = false;

    // raw blocks that need the complete signature
    struct RawStructure {
      std::string name;
      int line;
      std::vector<Line> body;
    };
    struct RawRule {
      std::string name;
      int line;
      std::vector<Line> body;
    };
    struct RawPattern {
      std::string name;
      int line;
      std::vector<Line> body;
    };
    std::vector<RawStructure> raw_structures;
    std::vector<RawRule> raw_rules;
    std::vector<RawPattern> raw_patterns;
    std::vector<Line> raw_constraints;

    while (!p.done()) {
      const Line line = p.take();
      const std::vector<std::string> words = split_words(line.text);
      const std::string& head = words.front();
      if (head == "predicates") {
        if (sig_frozen) fail("predicates block must come before instrumentation", line.number);
        parse_predicates(p, *sig, line.number);
      } else if (head == "instr") {
        sig_frozen = true;
        parse_instr(line, *sig);
      } else if (head == "constraint") {
        raw_constraints.push_back(line);
      } else if (head == "structure" || head == "rule" || head == "pattern") {
        if (words.size() != 2 || !is_identifier(words[1]))
          fail("'" + head + "' needs a name", line.number);
        std::vector<Line> body;
        bool closed = false;
        while (!p.done()) {
          Line inner = p.take();
          if (inner.text == "end") {
            closed = true;
            break;
          }
          body.push_back(std::move(inner));
        }
        if (!closed) fail("missing 'end' for " + head + " '" + words[1] + "'", line.number);
        if (head == "structure")
          raw_structures.push_back({words[1], line.number, std::move(body)});
        else if (head == "rule")
          raw_rules.push_back({words[1], line.number, std::move(body)});
        else
          raw_patterns.push_back({words[1], line.number, std::move(body)});
      } else {
        fail("unknown directive '" + head + "'", line.number);
      }
    }

    ModelFile model;
    model.signature = sig;

    for (const Line& line : raw_constraints)
      model.hand_constraints.push_back(parse_constraint(line, *sig));

    for (const RawStructure& raw : raw_structures) {
      if (model.structures.count(raw.name))
        fail("duplicate structure '" + raw.name + "'", raw.line);
      model.structure_order.push_back(raw.name);
      model.structures.emplace(raw.name, parse_structure(raw.body, raw.line, sig));
    }
    for (const RawRule& raw : raw_rules) {
      for (const ShapeRule& r : model.rules)
        if (r.name() == raw.name) fail("duplicate rule '" + raw.name + "'", raw.line);
      model.rules.push_back(parse_rule(raw.name, raw.body, raw.line, *sig, model.warnings));
    }
    for (const RawPattern& raw : raw_patterns) {
      for (const ForbiddenPattern& f : model.patterns)
        if (f.name == raw.name) fail("duplicate pattern '" + raw.name + "'", raw.line);
      ForbiddenPattern pattern{raw.name, parse_rule_graph(raw.body, raw.line, *sig)};
      pattern_formula(pattern, *sig); // validates labels
      model.patterns.push_back(std::move(pattern));
    }

    if (!model.structures.count("start"))
      throw ModelError(origin_ + ": no start structure (a structure named 'start' is required)");

    // The start shape must be consistent with the constraints.
    if (!coerce(model.start(), model.all_constraints()))
      throw ModelError(origin_ + ": start shape fails initial coercion");

    for (const std::string& w : model.warnings) log_warn(origin_, ": ", w);
    return model;
  }

private:
  void parse_predicates(SectionParser& p, PredicateSignature& sig, int start_line) {
    bool closed = false;
    while (!p.done()) {
      const Line line = p.take();
      if (line.text == "end") {
        closed = true;
        break;
      }
      const std::vector<std::string> words = split_words(line.text);
      if (words.front() == "unary") {
        for (std::size_t i = 1; i < words.size(); ++i) sig.add_unary(words[i]);
      } else if (words.front() == "binary") {
        for (std::size_t i = 1; i < words.size(); ++i) sig.add_binary(words[i]);
      } else {
        fail("expected 'unary ...' or 'binary ...' in predicates block", line.number);
      }
    }
    if (!closed) fail("missing 'end' for predicates block", start_line);
  }

  // instr name(v) := formula
  void parse_instr(const Line& line, PredicateSignature& sig) {
    const std::size_t assign = line.text.find(":=");
    if (assign == std::string::npos) fail("instr line needs ':='", line.number);
    std::string head = line.text.substr(5, assign - 5);
    head.erase(std::remove_if(head.begin(), head.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               head.end());
    const auto [name, args] = parse_atom(head, line.number);
    if (args.size() != 1) fail("instrumentation predicates are unary", line.number);
    Formula meaning = parse_with_context(line.text.substr(assign + 2), line.number);
    try {
      sig.add_instrumentation(name, args[0], std::move(meaning));
    } catch (const ModelError& e) {
      fail(e.what(), line.number);
    }
  }

  // constraint body => [!]head(vars)
  CompatibilityConstraint parse_constraint(const Line& line, const PredicateSignature& sig) {
    std::string text = line.text.substr(std::string("constraint").size());
    const std::size_t arrow = text.find("=>");
    if (arrow == std::string::npos) fail("constraint line needs '=>'", line.number);
    Formula body = parse_with_context(text.substr(0, arrow), line.number);
    std::string head = text.substr(arrow + 2);
    head.erase(std::remove_if(head.begin(), head.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               head.end());
    bool negated = false;
    if (!head.empty() && head[0] == '!') {
      negated = true;
      head.erase(0, 1);
    }
    const auto [pred, vars] = parse_atom(head, line.number);
    try {
      check_formula(body, sig);
      CompatibilityConstraint c(std::move(body), negated, pred, vars);
      c.check(sig);
      return c;
    } catch (const Error& e) {
      fail(e.what(), line.number);
    }
  }

  LogicalStructure parse_structure(const std::vector<Line>& body, int start_line,
                                   const SignaturePtr& sig) {
    LogicalStructure s(sig);
    for (const Line& line : body) {
      const std::vector<std::string> words = split_words(line.text);
      if (words.front() == "node") {
        if (words.size() < 2 || !is_identifier(words[1])) fail("bad node line", line.number);
        try {
          s.add_node(NodeId(words[1]));
        } catch (const Error& e) {
          fail(e.what(), line.number);
        }
        if (words.size() == 3) {
          if (words[2] != "sm=1/2") fail("expected 'sm=1/2'", line.number);
          s.set_value(std::string(kSummaryPred), NodeId(words[1]), TruthValue::Maybe);
        } else if (words.size() > 3) {
          fail("bad node line", line.number);
        }
      } else if (words.front() == "set") {
        // set pred(args) = value
        const std::size_t eq = line.text.rfind('=');
        if (eq == std::string::npos) fail("set line needs '='", line.number);
        std::string atom_text = line.text.substr(3, eq - 3);
        std::string value_text = line.text.substr(eq + 1);
        atom_text.erase(std::remove_if(atom_text.begin(), atom_text.end(),
                                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                        atom_text.end());
        value_text.erase(std::remove_if(value_text.begin(), value_text.end(),
                                        [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                         value_text.end());
        const auto [pred, args] = parse_atom(atom_text, line.number);
        const auto value = truth_value_from_text(value_text);
        if (!value) fail("bad truth value '" + value_text + "'", line.number);
        try {
          if (args.size() == 1)
            s.set_value(pred, NodeId(args[0]), *value);
          else
            s.set_value(pred, NodeId(args[0]), NodeId(args[1]), *value);
        } catch (const Error& e) {
          fail(e.what(), line.number);
        }
      } else {
        fail("expected 'node' or 'set' in structure block", line.number);
      }
    }
    (void)start_line;
    return s;
  }

  // shared by rule lhs/rhs and pattern bodies
  Graph parse_rule_graph(const std::vector<Line>& body, int start_line,
                         const PredicateSignature& sig) {
    Graph g;
    for (const Line& line : body) {
      const std::vector<std::string> words = split_words(line.text);
      if (words.front() == "node") {
        // node id [: Type[, Type...]]
        std::string rest = line.text.substr(4);
        const std::size_t colon = rest.find(':');
        std::string id_part = colon == std::string::npos ? rest : rest.substr(0, colon);
        std::vector<std::string> id_words = split_words(id_part);
        if (id_words.size() != 1 || !is_identifier(id_words[0]))
          fail("bad node line in rule graph", line.number);
        const NodeId node(id_words[0]);
        try {
          g.add_node(node);
        } catch (const Error& e) {
          fail(e.what(), line.number);
        }
        if (colon != std::string::npos) {
          std::string types = rest.substr(colon + 1);
          std::size_t pos = 0;
          while (pos < types.size()) {
            std::size_t comma = types.find(',', pos);
            std::string type = types.substr(pos, comma == std::string::npos ? comma : comma - pos);
            type.erase(std::remove_if(type.begin(), type.end(),
                                      [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                       type.end());
            if (!is_identifier(type)) fail("bad type name '" + type + "'", line.number);
            if (!sig.is_unary_core(type) || type == kSummaryPred)
              fail("node type '" + type + "' is not a unary core predicate", line.number);
            g.add_edge(node, type, node);
            if (comma == std::string::npos) break;
            pos = comma + 1;
          }
        }
      } else if (words.front() == "edge") {
        std::string atom_text = line.text.substr(4);
        atom_text.erase(std::remove_if(atom_text.begin(), atom_text.end(),
                                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                        atom_text.end());
        const auto [pred, args] = parse_atom(atom_text, line.number);
        const int arity = sig.arity(pred);
        if (arity == 0) fail("unknown predicate '" + pred + "' in edge", line.number);
        if (sig.is_instrumentation(pred) || pred == kSummaryPred)
          fail("'" + pred + "' cannot appear in a rule graph", line.number);
        if (static_cast<int>(args.size()) != arity)
          fail("arity mismatch for '" + pred + "' in edge", line.number);
        try {
          if (args.size() == 1)
            g.add_edge(NodeId(args[0]), pred, NodeId(args[0]));
          else
            g.add_edge(NodeId(args[0]), pred, NodeId(args[1]));
        } catch (const Error& e) {
          fail(e.what(), line.number);
        }
      } else {
        fail("expected 'node' or 'edge' in rule graph", line.number);
      }
    }
    (void)start_line;
    return g;
  }

  ShapeRule parse_rule(const std::string& name, const std::vector<Line>& body, int start_line,
                       const PredicateSignature& sig, std::vector<std::string>& warnings) {
    std::vector<Line> lhs_lines;
    std::vector<Line> rhs_lines;
    std::vector<Line> update_lines;
    enum class Section { None, Lhs, Rhs } section = Section::None;
    for (const Line& line : body) {
      if (line.text == "lhs") {
        section = Section::Lhs;
      } else if (line.text == "rhs") {
        section = Section::Rhs;
      } else if (split_words(line.text).front() == "update") {
        update_lines.push_back(line);
      } else if (section == Section::Lhs) {
        lhs_lines.push_back(line);
      } else if (section == Section::Rhs) {
        rhs_lines.push_back(line);
      } else {
        fail("rule line outside lhs/rhs", line.number);
      }
    }

    GraphRule rule(name, parse_rule_graph(lhs_lines, start_line, sig),
                   parse_rule_graph(rhs_lines, start_line, sig));
    production_formula(rule, sig); // validates labels
    ShapeRule shape_rule(std::move(rule));

    std::set<std::string> lhs_names;
    for (const NodeId& n : shape_rule.rule().left().nodes()) lhs_names.insert(n.str());

    for (const Line& line : update_lines) {
      const std::size_t assign = line.text.find(":=");
      if (assign == std::string::npos) fail("update line needs ':='", line.number);
      std::string head = line.text.substr(6, assign - 6);
      head.erase(std::remove_if(head.begin(), head.end(),
                                [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                 head.end());
      const auto [pred, args] = parse_atom(head, line.number);
      if (!sig.is_instrumentation(pred))
        fail("'" + pred + "' is not an instrumentation predicate", line.number);
      if (args.size() != 1) fail("update target must be a unary atom", line.number);
      Formula f = parse_with_context(line.text.substr(assign + 2), line.number);
      try {
        check_formula(f, sig);
      } catch (const Error& e) {
        fail(e.what(), line.number);
      }
      for (const std::string& v : f.free_vars())
        if (!lhs_names.count(v))
          fail("update formula variable '" + v + "' is not a left-hand-side node", line.number);
      try {
        shape_rule.set_update(pred, NodeId(args[0]), std::move(f));
      } catch (const Error& e) {
        fail(e.what(), line.number);
      }
    }

    // Missing updates default to 1/2; warn so modelers add precise formulas.
    for (const PredicateSignature::Instrumentation& instr : sig.instrumentation()) {
      for (const NodeId& v : shape_rule.rule().right().nodes()) {
        if (!shape_rule.update(instr.name, v)) {
          shape_rule.set_update(instr.name, v, Formula::constant(TruthValue::Maybe));
          warnings.push_back("rule " + name + ": update " + instr.name + "(" + v.str() +
                             ") defaulted to 1/2");
        }
      }
    }
    return shape_rule;
  }

  Formula parse_with_context(const std::string& text, int line) {
    try {
      return parse_formula(text);
    } catch (const ParseError& e) {
      fail(std::string("formula: ") + e.what(), line);
    }
  }

  std::string origin_;
};

} // namespace

ModelFile load_model_text(std::string_view text, const std::string& origin) {
  return ModelBuilder(origin).build(split_lines(text));
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read model file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model_text(buffer.str(), path.string());
}

ModelFile load_model_split(const std::filesystem::path& dir) {
  std::ostringstream combined;
  for (const char* name : {"predicates.gts", "start.gts", "rules.gts", "patterns.gts"}) {
    const std::filesystem::path path = dir / name;
    std::ifstream in(path);
    if (!in) throw ModelError("split model: cannot read '" + path.string() + "'");
    combined << in.rdbuf() << "\n";
  }
  return load_model_text(combined.str(), dir.string());
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string print_model(const ModelFile& model) {
  std::ostringstream os;
  const PredicateSignature& sig = *model.signature;

  os << "predicates\n";
  if (!sig.unary_core().empty()) {
    os << "  unary";
    for (const std::string& p : sig.unary_core()) os << " " << p;
    os << "\n";
  }
  if (!sig.binary_core().empty()) {
    os << "  binary";
    for (const std::string& p : sig.binary_core()) os << " " << p;
    os << "\n";
  }
  os << "end\n\n";

  for (const PredicateSignature::Instrumentation& instr : sig.instrumentation())
    os << "instr " << instr.name << "(" << instr.var << ") := " << instr.meaning.to_text() << "\n";
  if (!sig.instrumentation().empty()) os << "\n";

  for (const CompatibilityConstraint& c : model.hand_constraints)
    os << "constraint " << c.to_text() << "\n";
  if (!model.hand_constraints.empty()) os << "\n";

  for (const std::string& name : model.structure_order)
    os << model.structures.at(name).to_text(name) << "\n";

  for (const ShapeRule& rule : model.rules) {
    os << "rule " << rule.name() << "\n";
    auto print_graph = [&](const Graph& g) {
      for (const NodeId& n : g.nodes()) {
        os << "    node " << n.str();
        std::vector<std::string> types;
        for (const std::string& p : sig.unary_core())
          if (g.has_edge(n, p, n)) types.push_back(p);
        if (!types.empty()) {
          os << " : " << types[0];
          for (std::size_t i = 1; i < types.size(); ++i) os << ", " << types[i];
        }
        os << "\n";
      }
      for (const LabelledEdge& e : g.edges()) {
        if (sig.arity(e.label) == 1) continue; // types already printed
        os << "    edge " << e.label << "(" << e.src.str() << "," << e.dst.str() << ")\n";
      }
    };
    os << "  lhs\n";
    print_graph(rule.rule().left());
    os << "  rhs\n";
    print_graph(rule.rule().right());
    for (const auto& [key, formula] : rule.updates())
      os << "  update " << key.first << "(" << key.second.str() << ") := " << formula.to_text()
         << "\n";
    os << "end\n\n";
  }

  for (const ForbiddenPattern& pattern : model.patterns) {
    os << "pattern " << pattern.name << "\n";
    for (const NodeId& n : pattern.graph.nodes()) {
      os << "  node " << n.str();
      std::vector<std::string> types;
      for (const std::string& p : sig.unary_core())
        if (pattern.graph.has_edge(n, p, n)) types.push_back(p);
      if (!types.empty()) {
        os << " : " << types[0];
        for (std::size_t i = 1; i < types.size(); ++i) os << ", " << types[i];
      }
      os << "\n";
    }
    for (const LabelledEdge& e : pattern.graph.edges()) {
      if (sig.arity(e.label) == 1) continue;
      os << "  edge " << e.label << "(" << e.src.str() << "," << e.dst.str() << ")\n";
    }
    os << "end\n\n";
  }
  return os.str();
}

} // namespace gts
