#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gts/error.hpp"
#include "gts/kleene.hpp"
#include "gts/node_id.hpp"

namespace gts {

class PredicateSignature;
class LogicalStructure;

enum class FormulaKind {
  Constant,
  Pred1,
  Pred2,
  Equal,
  Not,
  And,
  Or,
  Implies,
  Exists,
  Forall,
};

/// Immutable first-order formula over unary/binary predicates, equality and
/// quantifiers. No transitive closure. Copies are cheap (shared tree).
class Formula {
public:
  static Formula constant(TruthValue value);
  static Formula pred1(std::string predicate, std::string var);
  static Formula pred2(std::string predicate, std::string var0, std::string var1);
  static Formula equal(std::string var0, std::string var1);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula exists(std::string var, Formula body);
  static Formula forall(std::string var, Formula body);

  /// Left-associated conjunction of all parts; TRUE when empty.
  static Formula conjoin_all(const std::vector<Formula>& parts);

  FormulaKind kind() const;
  TruthValue constant_value() const;         // Constant
  const std::string& pred_name() const;      // Pred1/Pred2
  const std::string& var(std::size_t i) const; // Pred1: 0; Pred2/Equal: 0,1
  const std::string& bound_var() const;      // Exists/Forall
  Formula child(std::size_t i) const;        // Not/quantifier: 0; binary: 0,1

  std::set<std::string> free_vars() const;
  std::string to_text() const;

  bool operator==(const Formula& other) const; // structural equality

  struct Node; // definition is internal to the module

private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the ASCII formula grammar: atoms `p(v)`, `p(v,w)`, `v == w`,
/// constants `0`, `1/2`, `1`; connectives `!`, `&`, `|`, `->`; quantifiers
/// `exists v:` / `forall v:` whose body extends maximally to the right.
/// Throws ParseError with line/column on malformed input.
Formula parse_formula(std::string_view text);

/// Parse and additionally check every predicate against the signature.
Formula parse_formula(std::string_view text, const PredicateSignature& sig);

/// Throws EvalError if the formula uses a predicate unknown to the signature
/// or with the wrong arity.
void check_formula(const Formula& f, const PredicateSignature& sig);

/// Compositional 3-valued evaluation. Quantifiers fold over the universe;
/// equality is definite on distinct nodes, 1 on a shared non-summary node
/// and 1/2 on a shared summary node. The assignment must cover free_vars(f).
TruthValue evaluate(const Formula& f, const LogicalStructure& s, const Assignment& m);

} // namespace gts
