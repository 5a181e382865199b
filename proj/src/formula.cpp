#include "gts/formula.hpp"

#include <cctype>
#include <sstream>

#include "gts/structure.hpp"

namespace gts {

struct Formula::Node {
  FormulaKind kind;
  TruthValue constant = TruthValue::False;
  std::string pred;
  std::string var0; // Pred1 arg, first arg, or bound variable
  std::string var1;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Formula::Node>;

NodePtr make_node(Formula::Node node) {
  return std::make_shared<const Formula::Node>(std::move(node));
}

} // namespace

Formula Formula::constant(TruthValue value) {
  return Formula(make_node({.kind = FormulaKind::Constant, .constant = value}));
}

Formula Formula::pred1(std::string predicate, std::string var) {
  return Formula(make_node(
      {.kind = FormulaKind::Pred1, .pred = std::move(predicate), .var0 = std::move(var)}));
}

Formula Formula::pred2(std::string predicate, std::string var0, std::string var1) {
  return Formula(make_node({.kind = FormulaKind::Pred2,
                            .pred = std::move(predicate),
                            .var0 = std::move(var0),
                            .var1 = std::move(var1)}));
}

Formula Formula::equal(std::string var0, std::string var1) {
  return Formula(make_node(
      {.kind = FormulaKind::Equal, .var0 = std::move(var0), .var1 = std::move(var1)}));
}

Formula Formula::negation(Formula f) {
  return Formula(make_node({.kind = FormulaKind::Not, .lhs = std::move(f.node_)}));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula(make_node(
      {.kind = FormulaKind::And, .lhs = std::move(lhs.node_), .rhs = std::move(rhs.node_)}));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula(make_node(
      {.kind = FormulaKind::Or, .lhs = std::move(lhs.node_), .rhs = std::move(rhs.node_)}));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return Formula(make_node(
      {.kind = FormulaKind::Implies, .lhs = std::move(lhs.node_), .rhs = std::move(rhs.node_)}));
}

Formula Formula::exists(std::string var, Formula body) {
  return Formula(make_node(
      {.kind = FormulaKind::Exists, .var0 = std::move(var), .lhs = std::move(body.node_)}));
}

Formula Formula::forall(std::string var, Formula body) {
  return Formula(make_node(
      {.kind = FormulaKind::Forall, .var0 = std::move(var), .lhs = std::move(body.node_)}));
}

Formula Formula::conjoin_all(const std::vector<Formula>& parts) {
  if (parts.empty()) return constant(TruthValue::True);
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conjunction(acc, parts[i]);
  return acc;
}

FormulaKind Formula::kind() const { return node_->kind; }

TruthValue Formula::constant_value() const { return node_->constant; }

const std::string& Formula::pred_name() const { return node_->pred; }

const std::string& Formula::var(std::size_t i) const {
  return i == 0 ? node_->var0 : node_->var1;
}

const std::string& Formula::bound_var() const { return node_->var0; }

Formula Formula::child(std::size_t i) const {
  return Formula(i == 0 ? node_->lhs : node_->rhs);
}

namespace {

void collect_free_vars(const Formula& f, std::set<std::string>& bound,
                       std::set<std::string>& out) {
  switch (f.kind()) {
  case FormulaKind::Constant:
    return;
  case FormulaKind::Pred1:
    if (!bound.count(f.var(0))) out.insert(f.var(0));
    return;
  case FormulaKind::Pred2:
  case FormulaKind::Equal:
    if (!bound.count(f.var(0))) out.insert(f.var(0));
    if (!bound.count(f.var(1))) out.insert(f.var(1));
    return;
  case FormulaKind::Not:
    collect_free_vars(f.child(0), bound, out);
    return;
  case FormulaKind::And:
  case FormulaKind::Or:
  case FormulaKind::Implies:
    collect_free_vars(f.child(0), bound, out);
    collect_free_vars(f.child(1), bound, out);
    return;
  case FormulaKind::Exists:
  case FormulaKind::Forall: {
    const bool was_bound = bound.count(f.bound_var()) > 0;
    bound.insert(f.bound_var());
    collect_free_vars(f.child(0), bound, out);
    if (!was_bound) bound.erase(f.bound_var());
    return;
  }
  }
}

} // namespace

std::set<std::string> Formula::free_vars() const {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect_free_vars(*this, bound, out);
  return out;
}

namespace {

// Precedence for printing: quantifiers bind weakest, then ->, |, &, !, atoms.
int precedence(FormulaKind kind) {
  switch (kind) {
  case FormulaKind::Exists:
  case FormulaKind::Forall: return 0;
  case FormulaKind::Implies: return 1;
  case FormulaKind::Or: return 2;
  case FormulaKind::And: return 3;
  case FormulaKind::Not: return 4;
  default: return 5;
  }
}

void print_formula(const Formula& f, int parent, std::ostream& os) {
  const int prec = precedence(f.kind());
  const bool parens = prec < parent;
  if (parens) os << "(";
  switch (f.kind()) {
  case FormulaKind::Constant:
    os << to_text(f.constant_value());
    break;
  case FormulaKind::Pred1:
    os << f.pred_name() << "(" << f.var(0) << ")";
    break;
  case FormulaKind::Pred2:
    os << f.pred_name() << "(" << f.var(0) << "," << f.var(1) << ")";
    break;
  case FormulaKind::Equal:
    os << f.var(0) << " == " << f.var(1);
    break;
  case FormulaKind::Not: {
    os << "!";
    const Formula body = f.child(0);
    if (body.kind() == FormulaKind::Equal) {
      os << "(";
      print_formula(body, 0, os);
      os << ")";
    } else {
      print_formula(body, 4, os);
    }
    break;
  }
  case FormulaKind::And:
    print_formula(f.child(0), 3, os);
    os << " & ";
    print_formula(f.child(1), 4, os);
    break;
  case FormulaKind::Or:
    print_formula(f.child(0), 2, os);
    os << " | ";
    print_formula(f.child(1), 3, os);
    break;
  case FormulaKind::Implies:
    print_formula(f.child(0), 2, os);
    os << " -> ";
    print_formula(f.child(1), 1, os);
    break;
  case FormulaKind::Exists:
  case FormulaKind::Forall:
    os << (f.kind() == FormulaKind::Exists ? "exists " : "forall ") << f.bound_var() << ": ";
    print_formula(f.child(0), 0, os);
    break;
  }
  if (parens) os << ")";
}

} // namespace

std::string Formula::to_text() const {
  std::ostringstream os;
  print_formula(*this, 0, os);
  return os.str();
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
  case FormulaKind::Constant:
    return constant_value() == other.constant_value();
  case FormulaKind::Pred1:
    return pred_name() == other.pred_name() && var(0) == other.var(0);
  case FormulaKind::Pred2:
    return pred_name() == other.pred_name() && var(0) == other.var(0) && var(1) == other.var(1);
  case FormulaKind::Equal:
    return var(0) == other.var(0) && var(1) == other.var(1);
  case FormulaKind::Not:
    return child(0) == other.child(0);
  case FormulaKind::And:
  case FormulaKind::Or:
  case FormulaKind::Implies:
    return child(0) == other.child(0) && child(1) == other.child(1);
  case FormulaKind::Exists:
  case FormulaKind::Forall:
    return bound_var() == other.bound_var() && child(0) == other.child(0);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class TokenKind {
  Ident,
  ConstZero,
  ConstHalf,
  ConstOne,
  LParen,
  RParen,
  Comma,
  EqEq,
  Bang,
  Amp,
  Pipe,
  Arrow,
  Colon,
  Exists,
  Forall,
  End,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    const int line = line_;
    const int col = column_;
    if (pos_ >= text_.size()) return {TokenKind::End, "", line, col};
    const char c = text_[pos_];
    if (c == '(') return take(TokenKind::LParen, 1, line, col);
    if (c == ')') return take(TokenKind::RParen, 1, line, col);
    if (c == ',') return take(TokenKind::Comma, 1, line, col);
    if (c == '!') return take(TokenKind::Bang, 1, line, col);
    if (c == '&') return take(TokenKind::Amp, 1, line, col);
    if (c == '|') return take(TokenKind::Pipe, 1, line, col);
    if (c == ':') return take(TokenKind::Colon, 1, line, col);
    if (c == '=') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=')
        return take(TokenKind::EqEq, 2, line, col);
      throw ParseError("expected '=='", line, col);
    }
    if (c == '-') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')
        return take(TokenKind::Arrow, 2, line, col);
      throw ParseError("expected '->'", line, col);
    }
    if (c == '0') return take(TokenKind::ConstZero, 1, line, col);
    if (c == '1') {
      if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '/' && text_[pos_ + 2] == '2')
        return take(TokenKind::ConstHalf, 3, line, col);
      return take(TokenKind::ConstOne, 1, line, col);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      std::string word(text_.substr(pos_, end - pos_));
      advance(end - pos_);
      if (word == "exists") return {TokenKind::Exists, word, line, col};
      if (word == "forall") return {TokenKind::Forall, word, line, col};
      return {TokenKind::Ident, word, line, col};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance(1);
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  Token take(TokenKind kind, std::size_t len, int line, int col) {
    std::string text(text_.substr(pos_, len));
    advance(len);
    return {kind, std::move(text), line, col};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Formula parse() {
    Formula f = parse_implication();
    expect(TokenKind::End, "end of formula");
    return f;
  }

private:
  void advance() { current_ = lexer_.next(); }

  void expect(TokenKind kind, const char* what) {
    if (current_.kind != kind)
      throw ParseError(std::string("expected ") + what, current_.line, current_.column);
  }

  bool accept(TokenKind kind) {
    if (current_.kind != kind) return false;
    advance();
    return true;
  }

  Formula parse_implication() {
    Formula lhs = parse_or();
    if (accept(TokenKind::Arrow)) return Formula::implication(lhs, parse_implication());
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(TokenKind::Pipe)) f = Formula::disjunction(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept(TokenKind::Amp)) f = Formula::conjunction(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept(TokenKind::Bang)) return Formula::negation(parse_unary());
    if (current_.kind == TokenKind::Exists || current_.kind == TokenKind::Forall) {
      const bool is_exists = current_.kind == TokenKind::Exists;
      advance();
      expect(TokenKind::Ident, "quantified variable");
      std::string var = current_.text;
      advance();
      expect(TokenKind::Colon, "':' after quantified variable");
      advance();
      // body extends maximally to the right
      Formula body = parse_implication();
      return is_exists ? Formula::exists(std::move(var), std::move(body))
                       : Formula::forall(std::move(var), std::move(body));
    }
    return parse_primary();
  }

  Formula parse_primary() {
    switch (current_.kind) {
    case TokenKind::ConstZero:
      advance();
      return Formula::constant(TruthValue::False);
    case TokenKind::ConstHalf:
      advance();
      return Formula::constant(TruthValue::Maybe);
    case TokenKind::ConstOne:
      advance();
      return Formula::constant(TruthValue::True);
    case TokenKind::LParen: {
      advance();
      Formula f = parse_implication();
      expect(TokenKind::RParen, "')'");
      advance();
      return f;
    }
    case TokenKind::Ident: {
      std::string name = current_.text;
      advance();
      if (accept(TokenKind::LParen)) {
        expect(TokenKind::Ident, "variable");
        std::string a = current_.text;
        advance();
        if (accept(TokenKind::Comma)) {
          expect(TokenKind::Ident, "variable");
          std::string b = current_.text;
          advance();
          expect(TokenKind::RParen, "')'");
          advance();
          return Formula::pred2(std::move(name), std::move(a), std::move(b));
        }
        expect(TokenKind::RParen, "')'");
        advance();
        return Formula::pred1(std::move(name), std::move(a));
      }
      if (accept(TokenKind::EqEq)) {
        expect(TokenKind::Ident, "variable");
        std::string b = current_.text;
        advance();
        return Formula::equal(std::move(name), std::move(b));
      }
      throw ParseError("expected '(' or '==' after identifier '" + name + "'",
                       current_.line, current_.column);
    }
    default:
      throw ParseError("expected formula", current_.line, current_.column);
    }
  }

  Lexer lexer_;
  Token current_{TokenKind::End, "", 1, 1};
};

} // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

Formula parse_formula(std::string_view text, const PredicateSignature& sig) {
  Formula f = Parser(text).parse();
  check_formula(f, sig);
  return f;
}

void check_formula(const Formula& f, const PredicateSignature& sig) {
  switch (f.kind()) {
  case FormulaKind::Constant:
  case FormulaKind::Equal:
    return;
  case FormulaKind::Pred1:
    if (!sig.has_predicate(f.pred_name()))
      throw EvalError("unknown predicate '" + f.pred_name() + "'");
    if (sig.arity(f.pred_name()) != 1)
      throw EvalError("predicate '" + f.pred_name() + "' is binary but used with one argument");
    return;
  case FormulaKind::Pred2:
    if (!sig.has_predicate(f.pred_name()))
      throw EvalError("unknown predicate '" + f.pred_name() + "'");
    if (sig.arity(f.pred_name()) != 2)
      throw EvalError("predicate '" + f.pred_name() + "' is unary but used with two arguments");
    return;
  case FormulaKind::Not:
  case FormulaKind::Exists:
  case FormulaKind::Forall:
    check_formula(f.child(0), sig);
    return;
  case FormulaKind::And:
  case FormulaKind::Or:
  case FormulaKind::Implies:
    check_formula(f.child(0), sig);
    check_formula(f.child(1), sig);
    return;
  }
}

namespace {

const NodeId& lookup(const Assignment& m, const std::string& var) {
  auto it = m.find(var);
  if (it == m.end()) throw EvalError("unbound variable '" + var + "'");
  return it->second;
}

TruthValue eval_rec(const Formula& f, const LogicalStructure& s, Assignment& m) {
  switch (f.kind()) {
  case FormulaKind::Constant:
    return f.constant_value();
  case FormulaKind::Pred1:
    return s.value(f.pred_name(), lookup(m, f.var(0)));
  case FormulaKind::Pred2:
    return s.value(f.pred_name(), lookup(m, f.var(0)), lookup(m, f.var(1)));
  case FormulaKind::Equal: {
    const NodeId& a = lookup(m, f.var(0));
    const NodeId& b = lookup(m, f.var(1));
    if (a != b) return TruthValue::False;
    return s.summary(a) == TruthValue::Maybe ? TruthValue::Maybe : TruthValue::True;
  }
  case FormulaKind::Not:
    return neg(eval_rec(f.child(0), s, m));
  case FormulaKind::And:
    return conj(eval_rec(f.child(0), s, m), eval_rec(f.child(1), s, m));
  case FormulaKind::Or:
    return disj(eval_rec(f.child(0), s, m), eval_rec(f.child(1), s, m));
  case FormulaKind::Implies:
    return implies(eval_rec(f.child(0), s, m), eval_rec(f.child(1), s, m));
  case FormulaKind::Exists:
  case FormulaKind::Forall: {
    const bool is_exists = f.kind() == FormulaKind::Exists;
    const std::string& var = f.bound_var();
    const Formula body = f.child(0);
    auto saved = m.find(var) != m.end() ? std::optional<NodeId>(m[var]) : std::nullopt;
    TruthValue acc = is_exists ? TruthValue::False : TruthValue::True;
    for (const NodeId& u : s.universe()) {
      m[var] = u;
      const TruthValue v = eval_rec(body, s, m);
      acc = is_exists ? disj(acc, v) : conj(acc, v);
      if (is_exists && acc == TruthValue::True) break;
      if (!is_exists && acc == TruthValue::False) break;
    }
    if (saved)
      m[var] = *saved;
    else
      m.erase(var);
    return acc;
  }
  }
  throw EvalError("corrupt formula node");
}

} // namespace

TruthValue evaluate(const Formula& f, const LogicalStructure& s, const Assignment& m) {
  check_formula(f, s.signature());
  Assignment scratch = m;
  return eval_rec(f, s, scratch);
}

} // namespace gts
