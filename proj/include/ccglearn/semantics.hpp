#pragma once

// Typed lambda calculus for logical forms.
//
// Terms are immutable trees with shared structure. Variables are identified
// by an integer id; names only exist in the printed form. And/Or are n-ary.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccglearn {

class SemType {
 public:
  enum class Kind { Entity, Truth, Real, Function };

  /// Default-constructed type is `t`.
  SemType();

  static SemType entity(std::string tag = {});
  static SemType truth();
  static SemType real();
  static SemType function(SemType arg, SemType result);

  Kind kind() const;
  bool is_entity() const { return kind() == Kind::Entity; }
  bool is_function() const { return kind() == Kind::Function; }
  /// Entity subtype tag, empty for bare `e`.
  const std::string& tag() const;
  SemType arg() const;
  SemType result() const;

  std::string str() const;

  friend bool operator==(const SemType& a, const SemType& b);

 private:
  struct Node;
  explicit SemType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Whether a value of type `given` may be used where `required` is expected.
/// Entity subtypes are interchangeable; everything else is structural.
bool accepts(const SemType& required, const SemType& given);

/// Drops entity subtype tags everywhere inside `type`.
SemType erase_tags(const SemType& type);

SemType parse_type(std::string_view text);

enum class TermKind {
  Constant,
  Variable,
  Apply,
  Lambda,
  And,
  Or,
  Not,
  Implies,
  Forall,
  Exists,
  Count,
  Argmax,
  Argmin,
  Iota,
};

struct Variable {
  int id = 0;
  SemType type;
};

struct TermNode;

class Term {
 public:
  /// Empty handle; only assignment and `empty()` are valid on it.
  Term() = default;
  bool empty() const { return node_ == nullptr; }

  static Term constant(std::string name, SemType type);
  static Term variable(Variable v);
  static Term apply(Term fn, Term arg);
  /// Curried application f(a1)(a2)...
  static Term apply(Term fn, std::span<const Term> args);
  static Term lambda(Variable v, Term body);
  static Term conj(std::vector<Term> conjuncts);
  static Term disj(std::vector<Term> disjuncts);
  static Term negation(Term t);
  static Term implies(Term antecedent, Term consequent);
  static Term forall(Variable v, Term body);
  static Term exists(Variable v, Term body);
  static Term count(Term set);
  static Term argmax(Term set, Term measure);
  static Term argmin(Term set, Term measure);
  static Term iota(Term set);
  /// Low-level factory; does not validate arity.
  static Term from_node(TermNode node);

  TermKind kind() const;
  /// Constant name.
  const std::string& name() const;
  /// Constant type, variable type, or the bound variable's type for binders.
  const SemType& type() const;
  /// Variable id, or the bound variable's id for binders.
  int var_id() const;
  Variable var() const { return {var_id(), type()}; }
  const std::vector<Term>& children() const;
  const Term& child(std::size_t i) const { return children()[i]; }

  bool is_binder() const;
  bool is(TermKind k) const { return kind() == k; }

  /// Structural identity (variable ids included).
  friend bool operator==(const Term& a, const Term& b);

  const TermNode* node() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  TermKind kind = TermKind::Constant;
  std::string name;
  SemType type;
  int var = -1;
  std::vector<Term> kids;
};

inline TermKind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline const SemType& Term::type() const { return node_->type; }
inline int Term::var_id() const { return node_->var; }
inline const std::vector<Term>& Term::children() const { return node_->kids; }

/// Declared constants of a domain. Each name is declared exactly once.
class Ontology {
 public:
  /// Throws DataError on redeclaration.
  void declare(std::string name, SemType type);
  const SemType* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return constants_.size(); }
  const std::map<std::string, SemType, std::less<>>& constants() const { return constants_; }

  /// `name : type` per line; `#` starts a comment.
  static Ontology parse(std::string_view text);
  static Ontology load(const std::string& path);
  std::string str() const;

 private:
  std::map<std::string, SemType, std::less<>> constants_;
};

Term parse_term(std::string_view text, const Ontology& ontology);
std::string print_term(const Term& t);

/// Infers the type of `t` from the types stored in its nodes. Free variables
/// take their annotated type.
SemType type_of(const Term& t);
/// As above but also requires `t` to be closed and every constant to be
/// declared in `ontology` with the stored type.
SemType type_of(const Term& t, const Ontology& ontology);

std::set<int> free_variables(const Term& t);
int max_variable_id(const Term& t);

/// Capture-avoiding substitution of `value` for free occurrences of `var`.
/// Throws TypeMismatch when the value's type is not accepted by `var`.
Term substitute(const Term& body, const Variable& var, const Term& value);

/// Beta normal form with nested And/Or flattened.
Term normalize(const Term& t);

/// Bound variables renumbered in traversal order, binder annotations without
/// entity tags, And/Or children sorted. Idempotent.
Term canonicalize(const Term& t);

/// Printed canonical form; equal keys iff the terms are equal up to
/// alpha-renaming and And/Or reordering.
std::string canonical_key(const Term& t);

/// Key that identifies a term up to alpha-renaming only (de Bruijn form).
std::string debruijn_key(const Term& t);

bool equivalent(const Term& a, const Term& b);

}  // namespace ccglearn
