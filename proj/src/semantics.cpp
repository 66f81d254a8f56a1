#include "ccglearn/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "ccglearn/errors.hpp"

namespace ccglearn {

// ---------------------------------------------------------------------------
// SemType

struct SemType::Node {
  Kind kind = Kind::Truth;
  std::string tag;
  std::shared_ptr<const Node> arg;
  std::shared_ptr<const Node> result;
};

SemType::SemType() {
  static const auto truth = std::make_shared<const Node>(Node{Kind::Truth, {}, nullptr, nullptr});
  node_ = truth;
}

SemType SemType::entity(std::string tag) {
  static const auto bare = std::make_shared<const Node>(Node{Kind::Entity, {}, nullptr, nullptr});
  if (tag.empty()) return SemType(bare);
  return SemType(std::make_shared<const Node>(Node{Kind::Entity, std::move(tag), nullptr, nullptr}));
}

SemType SemType::truth() { return SemType(); }

SemType SemType::real() {
  static const auto real = std::make_shared<const Node>(Node{Kind::Real, {}, nullptr, nullptr});
  return SemType(real);
}

SemType SemType::function(SemType arg, SemType result) {
  return SemType(
      std::make_shared<const Node>(Node{Kind::Function, {}, std::move(arg.node_), std::move(result.node_)}));
}

SemType::Kind SemType::kind() const { return node_->kind; }
const std::string& SemType::tag() const { return node_->tag; }
SemType SemType::arg() const { return SemType(node_->arg); }
SemType SemType::result() const { return SemType(node_->result); }

std::string SemType::str() const {
  switch (kind()) {
    case Kind::Entity:
      return tag().empty() ? "e" : "e:" + tag();
    case Kind::Truth:
      return "t";
    case Kind::Real:
      return "r";
    case Kind::Function:
      return "<" + arg().str() + "," + result().str() + ">";
  }
  return {};
}

bool operator==(const SemType& a, const SemType& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SemType::Kind::Entity:
      return a.tag() == b.tag();
    case SemType::Kind::Function:
      return a.arg() == b.arg() && a.result() == b.result();
    default:
      return true;
  }
}

bool accepts(const SemType& required, const SemType& given) {
  if (required.kind() != given.kind()) return false;
  if (required.is_function())
    return accepts(required.arg(), given.arg()) && accepts(required.result(), given.result());
  return true;
}

SemType erase_tags(const SemType& type) {
  switch (type.kind()) {
    case SemType::Kind::Entity:
      return type.tag().empty() ? type : SemType::entity();
    case SemType::Kind::Function:
      return SemType::function(erase_tags(type.arg()), erase_tags(type.result()));
    default:
      return type;
  }
}

// ---------------------------------------------------------------------------
// Term construction

Term Term::from_node(TermNode node) { return Term(std::make_shared<const TermNode>(std::move(node))); }

Term Term::constant(std::string name, SemType type) {
  TermNode n;
  n.kind = TermKind::Constant;
  n.name = std::move(name);
  n.type = std::move(type);
  return from_node(std::move(n));
}

Term Term::variable(Variable v) {
  TermNode n;
  n.kind = TermKind::Variable;
  n.var = v.id;
  n.type = std::move(v.type);
  return from_node(std::move(n));
}

namespace {

Term node_with_kids(TermKind kind, std::vector<Term> kids) {
  TermNode n;
  n.kind = kind;
  n.kids = std::move(kids);
  return Term::from_node(std::move(n));
}

Term binder(TermKind kind, Variable v, Term body) {
  TermNode n;
  n.kind = kind;
  n.var = v.id;
  n.type = std::move(v.type);
  n.kids = {std::move(body)};
  return Term::from_node(std::move(n));
}

}  // namespace

Term Term::apply(Term fn, Term arg) { return node_with_kids(TermKind::Apply, {std::move(fn), std::move(arg)}); }

Term Term::apply(Term fn, std::span<const Term> args) {
  for (const auto& a : args) fn = apply(std::move(fn), a);
  return fn;
}

Term Term::lambda(Variable v, Term body) { return binder(TermKind::Lambda, std::move(v), std::move(body)); }
Term Term::forall(Variable v, Term body) { return binder(TermKind::Forall, std::move(v), std::move(body)); }
Term Term::exists(Variable v, Term body) { return binder(TermKind::Exists, std::move(v), std::move(body)); }

Term Term::conj(std::vector<Term> conjuncts) {
  if (conjuncts.size() < 2) throw Error("and() needs at least two conjuncts");
  return node_with_kids(TermKind::And, std::move(conjuncts));
}

Term Term::disj(std::vector<Term> disjuncts) {
  if (disjuncts.size() < 2) throw Error("or() needs at least two disjuncts");
  return node_with_kids(TermKind::Or, std::move(disjuncts));
}

Term Term::negation(Term t) { return node_with_kids(TermKind::Not, {std::move(t)}); }
Term Term::implies(Term a, Term b) { return node_with_kids(TermKind::Implies, {std::move(a), std::move(b)}); }
Term Term::count(Term set) { return node_with_kids(TermKind::Count, {std::move(set)}); }
Term Term::argmax(Term set, Term measure) {
  return node_with_kids(TermKind::Argmax, {std::move(set), std::move(measure)});
}
Term Term::argmin(Term set, Term measure) {
  return node_with_kids(TermKind::Argmin, {std::move(set), std::move(measure)});
}
Term Term::iota(Term set) { return node_with_kids(TermKind::Iota, {std::move(set)}); }

bool Term::is_binder() const {
  return kind() == TermKind::Lambda || kind() == TermKind::Forall || kind() == TermKind::Exists;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Constant:
      return a.name() == b.name() && a.type() == b.type();
    case TermKind::Variable:
      return a.var_id() == b.var_id() && a.type() == b.type();
    default:
      break;
  }
  if (a.is_binder() && (a.var_id() != b.var_id() || !(a.type() == b.type()))) return false;
  return a.children() == b.children();
}

namespace {

/// Returns `t` itself when no child changed, so untouched subtrees stay shared.
Term rebuild(const Term& t, std::vector<Term> kids) {
  bool same = kids.size() == t.children().size();
  for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i].node() == t.child(i).node();
  if (same) return t;
  TermNode n = *t.node();
  n.kids = std::move(kids);
  return Term::from_node(std::move(n));
}

Term rebuild_binder(const Term& t, Variable v, Term body) {
  if (v.id == t.var_id() && v.type == t.type() && body.node() == t.child(0).node()) return t;
  return binder(t.kind(), std::move(v), std::move(body));
}

const char* keyword_of(TermKind k) {
  switch (k) {
    case TermKind::Lambda: return "lambda";
    case TermKind::And: return "and";
    case TermKind::Or: return "or";
    case TermKind::Not: return "not";
    case TermKind::Implies: return "implies";
    case TermKind::Forall: return "forall";
    case TermKind::Exists: return "exists";
    case TermKind::Count: return "count";
    case TermKind::Argmax: return "argmax";
    case TermKind::Argmin: return "argmin";
    case TermKind::Iota: return "iota";
    default: return "";
  }
}

std::optional<TermKind> keyword_kind(std::string_view word) {
  static const std::pair<std::string_view, TermKind> table[] = {
      {"lambda", TermKind::Lambda}, {"and", TermKind::And},         {"or", TermKind::Or},
      {"not", TermKind::Not},       {"implies", TermKind::Implies}, {"forall", TermKind::Forall},
      {"exists", TermKind::Exists}, {"count", TermKind::Count},     {"argmax", TermKind::Argmax},
      {"argmin", TermKind::Argmin}, {"iota", TermKind::Iota},
  };
  for (const auto& [w, k] : table)
    if (w == word) return k;
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Surface syntax

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }
  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t pos) { pos_ = pos; }
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos_, what); }

  SemType type() {
    skip_space();
    if (consume('<')) {
      SemType a = type();
      expect(',');
      SemType b = type();
      expect('>');
      return SemType::function(std::move(a), std::move(b));
    }
    std::string word = identifier();
    if (word == "t") return SemType::truth();
    if (word == "r") return SemType::real();
    if (word == "e") {
      // `e:tag`; a following ':' always introduces a subtype tag.
      if (peek() == ':') {
        ++pos_;
        return SemType::entity(identifier());
      }
      return SemType::entity();
    }
    fail("unknown type '" + word + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

class TermParser {
 public:
  TermParser(std::string_view text, const Ontology& ont) : in_(text), ont_(ont) {}

  Term parse() {
    Term t = expr();
    if (!in_.at_end()) in_.fail("unexpected trailing input");
    return t;
  }

 private:
  Term expr() {
    std::size_t save = in_.pos();
    in_.skip_space();
    if (is_ident_char(in_.peek())) {
      std::string word = in_.identifier();
      auto kind = keyword_kind(word);
      if (kind && (*kind == TermKind::Lambda || *kind == TermKind::Forall || *kind == TermKind::Exists))
        return binder_expr(*kind);
    }
    in_.set_pos(save);
    return application();
  }

  Term binder_expr(TermKind kind) {
    std::string name = in_.identifier();
    if (keyword_kind(name)) in_.fail("keyword '" + name + "' used as a variable");
    in_.expect(':');
    SemType type = in_.type();
    in_.expect('.');
    Variable v{next_id_++, type};
    scope_.emplace_back(name, v);
    if (in_.at_end() || in_.peek() == ')' || in_.peek() == ',') in_.fail("missing binder body");
    Term body = expr();
    scope_.pop_back();
    return binder(kind, v, std::move(body));
  }

  Term application() {
    Term head = atom();
    while (in_.peek() == '(') {
      std::vector<Term> args = arguments();
      head = Term::apply(std::move(head), args);
    }
    return head;
  }

  std::vector<Term> arguments() {
    in_.expect('(');
    std::vector<Term> args;
    if (in_.peek() == ')') in_.fail("empty argument list");
    args.push_back(expr());
    while (in_.consume(',')) args.push_back(expr());
    in_.expect(')');
    return args;
  }

  Term atom() {
    if (in_.consume('(')) {
      Term t = expr();
      in_.expect(')');
      return t;
    }
    std::size_t at = in_.pos();
    std::string word = in_.identifier();
    if (auto kind = keyword_kind(word)) {
      if (*kind == TermKind::Lambda || *kind == TermKind::Forall || *kind == TermKind::Exists)
        in_.fail("binder '" + word + "' cannot appear here without parentheses");
      if (in_.peek() != '(') in_.fail("'" + word + "' needs an argument list");
      std::vector<Term> args = arguments();
      auto arity_error = [&](const char* need) {
        throw SyntaxError(at, "'" + word + "' takes " + need + " argument(s)");
      };
      switch (*kind) {
        case TermKind::And:
          if (args.size() < 2) arity_error("at least 2");
          return Term::conj(std::move(args));
        case TermKind::Or:
          if (args.size() < 2) arity_error("at least 2");
          return Term::disj(std::move(args));
        case TermKind::Not:
          if (args.size() != 1) arity_error("1");
          return Term::negation(args[0]);
        case TermKind::Implies:
          if (args.size() != 2) arity_error("2");
          return Term::implies(args[0], args[1]);
        case TermKind::Count:
          if (args.size() != 1) arity_error("1");
          return Term::count(args[0]);
        case TermKind::Argmax:
          if (args.size() != 2) arity_error("2");
          return Term::argmax(args[0], args[1]);
        case TermKind::Argmin:
          if (args.size() != 2) arity_error("2");
          return Term::argmin(args[0], args[1]);
        case TermKind::Iota:
          if (args.size() != 1) arity_error("1");
          return Term::iota(args[0]);
        default:
          break;
      }
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == word) return Term::variable(it->second);
    if (const SemType* type = ont_.find(word)) return Term::constant(word, *type);
    throw UnknownConstant(word);
  }

  Reader in_;
  const Ontology& ont_;
  std::vector<std::pair<std::string, Variable>> scope_;
  int next_id_ = 0;
};

}  // namespace

SemType parse_type(std::string_view text) {
  Reader in(text);
  SemType t = in.type();
  if (!in.at_end()) in.fail("unexpected trailing input");
  return t;
}

Term parse_term(std::string_view text, const Ontology& ontology) {
  TermParser parser(text, ontology);
  Term t = parser.parse();
  type_of(t, ontology);
  return t;
}

namespace {

class Printer {
 public:
  explicit Printer(bool erase) : erase_(erase) {}

  std::string print(const Term& t) {
    collect_constants(t);
    std::string out;
    emit(t, out);
    return out;
  }

 private:
  void collect_constants(const Term& t) {
    if (t.is(TermKind::Constant)) taken_.insert(t.name());
    for (const auto& k : t.children()) collect_constants(k);
  }

  std::string fresh_name(const SemType& type) {
    static const char* const entity_names[] = {"x", "y", "z", "w", "v", "u"};
    static const char* const function_names[] = {"f", "g", "h"};
    const bool fn = type.is_function();
    const auto& pool_size = fn ? std::size(function_names) : std::size(entity_names);
    std::size_t& counter = fn ? function_count_ : entity_count_;
    while (true) {
      std::size_t i = counter++;
      std::string name = fn ? function_names[i % pool_size] : entity_names[i % pool_size];
      if (i >= pool_size) name += std::to_string(i / pool_size);
      if (!taken_.count(name)) {
        taken_.insert(name);
        return name;
      }
    }
  }

  std::string type_str(const SemType& type) const { return erase_ ? erase_tags(type).str() : type.str(); }

  void emit(const Term& t, std::string& out) {
    switch (t.kind()) {
      case TermKind::Constant:
        out += t.name();
        return;
      case TermKind::Variable: {
        auto it = names_.find(t.var_id());
        if (it != names_.end())
          out += it->second;
        else
          out += "$" + std::to_string(t.var_id());
        return;
      }
      case TermKind::Apply: {
        std::vector<const Term*> args;
        const Term* head = &t;
        while (head->is(TermKind::Apply)) {
          args.push_back(&head->child(1));
          head = &head->child(0);
        }
        if (head->is(TermKind::Constant) || head->is(TermKind::Variable)) {
          emit(*head, out);
        } else {
          out += '(';
          emit(*head, out);
          out += ')';
        }
        out += '(';
        for (auto it = args.rbegin(); it != args.rend(); ++it) {
          if (it != args.rbegin()) out += ", ";
          emit(**it, out);
        }
        out += ')';
        return;
      }
      case TermKind::Lambda:
      case TermKind::Forall:
      case TermKind::Exists: {
        std::string name = fresh_name(t.type());
        auto previous = names_.find(t.var_id());
        std::optional<std::string> shadowed;
        if (previous != names_.end()) shadowed = previous->second;
        names_[t.var_id()] = name;
        out += keyword_of(t.kind());
        out += ' ';
        out += name;
        out += ':';
        out += type_str(t.type());
        out += " . ";
        emit(t.child(0), out);
        if (shadowed)
          names_[t.var_id()] = *shadowed;
        else
          names_.erase(t.var_id());
        return;
      }
      default: {
        out += keyword_of(t.kind());
        out += '(';
        bool first = true;
        for (const auto& k : t.children()) {
          if (!first) out += ", ";
          first = false;
          emit(k, out);
        }
        out += ')';
        return;
      }
    }
  }

  bool erase_;
  std::set<std::string> taken_;
  std::unordered_map<int, std::string> names_;
  std::size_t entity_count_ = 0;
  std::size_t function_count_ = 0;
};

}  // namespace

std::string print_term(const Term& t) { return Printer(false).print(t); }

// ---------------------------------------------------------------------------
// Typing

namespace {

SemType entity_set_type() { return SemType::function(SemType::entity(), SemType::truth()); }
SemType measure_type() { return SemType::function(SemType::entity(), SemType::real()); }

void require(const SemType& required, const SemType& given, const Term& where, const char* role) {
  if (!accepts(required, given))
    throw TypeMismatch(std::string(role) + " of type " + given.str() + " where " + required.str() +
                       " is required in " + print_term(where));
}

class TypeChecker {
 public:
  TypeChecker(const Ontology* ont, bool require_closed) : ont_(ont), closed_(require_closed) {}

  SemType check(const Term& t) {
    switch (t.kind()) {
      case TermKind::Constant: {
        if (ont_) {
          const SemType* declared = ont_->find(t.name());
          if (!declared) throw UnknownConstant(t.name());
          if (!(*declared == t.type()))
            throw TypeMismatch("constant '" + t.name() + "' used with type " + t.type().str() +
                               " but declared " + declared->str());
        }
        return t.type();
      }
      case TermKind::Variable: {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
          if (it->id == t.var_id()) return it->type;
        if (closed_) throw TypeMismatch("unbound variable in term " + print_term(t));
        return t.type();
      }
      case TermKind::Apply: {
        SemType fn = check(t.child(0));
        SemType arg = check(t.child(1));
        if (!fn.is_function())
          throw TypeMismatch("applying non-function of type " + fn.str() + " in " + print_term(t));
        require(fn.arg(), arg, t, "argument");
        return fn.result();
      }
      case TermKind::Lambda: {
        bound_.push_back(t.var());
        SemType body = check(t.child(0));
        bound_.pop_back();
        return SemType::function(t.type(), body);
      }
      case TermKind::Forall:
      case TermKind::Exists: {
        bound_.push_back(t.var());
        SemType body = check(t.child(0));
        bound_.pop_back();
        require(SemType::truth(), body, t, "quantifier body");
        return SemType::truth();
      }
      case TermKind::And:
      case TermKind::Or:
      case TermKind::Not:
      case TermKind::Implies:
        for (const auto& k : t.children()) require(SemType::truth(), check(k), t, "operand");
        return SemType::truth();
      case TermKind::Count:
        require(entity_set_type(), check(t.child(0)), t, "count set");
        return SemType::real();
      case TermKind::Argmax:
      case TermKind::Argmin:
        require(entity_set_type(), check(t.child(0)), t, "set");
        require(measure_type(), check(t.child(1)), t, "measure");
        return SemType::entity();
      case TermKind::Iota:
        require(entity_set_type(), check(t.child(0)), t, "iota set");
        return SemType::entity();
    }
    return SemType::truth();
  }

 private:
  const Ontology* ont_;
  bool closed_;
  std::vector<Variable> bound_;
};

}  // namespace

SemType type_of(const Term& t) { return TypeChecker(nullptr, false).check(t); }

SemType type_of(const Term& t, const Ontology& ontology) { return TypeChecker(&ontology, true).check(t); }

// ---------------------------------------------------------------------------
// Variables and substitution

namespace {

void collect_free(const Term& t, std::vector<int>& bound, std::set<int>& out) {
  if (t.is(TermKind::Variable)) {
    if (std::find(bound.begin(), bound.end(), t.var_id()) == bound.end()) out.insert(t.var_id());
    return;
  }
  if (t.is_binder()) bound.push_back(t.var_id());
  for (const auto& k : t.children()) collect_free(k, bound, out);
  if (t.is_binder()) bound.pop_back();
}

bool occurs_free(const Term& t, int id) {
  if (t.is(TermKind::Variable)) return t.var_id() == id;
  if (t.is_binder() && t.var_id() == id) return false;
  for (const auto& k : t.children())
    if (occurs_free(k, id)) return true;
  return false;
}

Term subst(const Term& t, int id, const Term& value, const std::set<int>& value_free, int& next_id) {
  switch (t.kind()) {
    case TermKind::Variable:
      return t.var_id() == id ? value : t;
    case TermKind::Constant:
      return t;
    default:
      break;
  }
  if (t.is_binder()) {
    if (t.var_id() == id || !occurs_free(t.child(0), id)) return t;
    if (value_free.count(t.var_id())) {
      Variable fresh{next_id++, t.type()};
      Term renamed = subst(t.child(0), t.var_id(), Term::variable(fresh), {fresh.id}, next_id);
      return binder(t.kind(), fresh, subst(renamed, id, value, value_free, next_id));
    }
    return rebuild_binder(t, t.var(), subst(t.child(0), id, value, value_free, next_id));
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& k : t.children()) kids.push_back(subst(k, id, value, value_free, next_id));
  return rebuild(t, std::move(kids));
}

Term substitute_unchecked(const Term& body, int id, const Term& value) {
  int next_id = std::max({max_variable_id(body), max_variable_id(value), id}) + 1;
  return subst(body, id, value, free_variables(value), next_id);
}

}  // namespace

std::set<int> free_variables(const Term& t) {
  std::set<int> out;
  std::vector<int> bound;
  collect_free(t, bound, out);
  return out;
}

int max_variable_id(const Term& t) {
  int best = -1;
  if (t.is(TermKind::Variable) || t.is_binder()) best = t.var_id();
  for (const auto& k : t.children()) best = std::max(best, max_variable_id(k));
  return best;
}

Term substitute(const Term& body, const Variable& var, const Term& value) {
  SemType value_type = type_of(value);
  if (!accepts(var.type, value_type))
    throw TypeMismatch("cannot substitute a value of type " + value_type.str() + " for a variable of type " +
                       var.type.str());
  return substitute_unchecked(body, var.id, value);
}

// ---------------------------------------------------------------------------
// Normalization

Term normalize(const Term& t) {
  switch (t.kind()) {
    case TermKind::Constant:
    case TermKind::Variable:
      return t;
    case TermKind::Apply: {
      Term fn = normalize(t.child(0));
      Term arg = normalize(t.child(1));
      if (fn.is(TermKind::Lambda)) return normalize(substitute_unchecked(fn.child(0), fn.var_id(), arg));
      return rebuild(t, {std::move(fn), std::move(arg)});
    }
    case TermKind::And:
    case TermKind::Or: {
      std::vector<Term> kids;
      for (const auto& k : t.children()) {
        Term n = normalize(k);
        if (n.kind() == t.kind())
          kids.insert(kids.end(), n.children().begin(), n.children().end());
        else
          kids.push_back(std::move(n));
      }
      return rebuild(t, std::move(kids));
    }
    default: {
      std::vector<Term> kids;
      kids.reserve(t.children().size());
      for (const auto& k : t.children()) kids.push_back(normalize(k));
      if (t.is_binder()) return rebuild_binder(t, t.var(), std::move(kids[0]));
      return rebuild(t, std::move(kids));
    }
  }
}

// ---------------------------------------------------------------------------
// Canonical forms

namespace {

void debruijn(const Term& t, std::vector<int>& env, std::string& out) {
  switch (t.kind()) {
    case TermKind::Constant:
      out += t.name();
      return;
    case TermKind::Variable: {
      for (std::size_t i = env.size(); i-- > 0;) {
        if (env[i] == t.var_id()) {
          out += '#';
          out += std::to_string(env.size() - 1 - i);
          return;
        }
      }
      out += '$';
      out += std::to_string(t.var_id());
      return;
    }
    case TermKind::Apply:
      out += "(@ ";
      break;
    default:
      out += '(';
      out += keyword_of(t.kind());
      if (t.is_binder()) {
        out += ':';
        out += erase_tags(t.type()).str();
      }
      out += ' ';
      break;
  }
  if (t.is_binder()) env.push_back(t.var_id());
  bool first = true;
  for (const auto& k : t.children()) {
    if (!first) out += ' ';
    first = false;
    debruijn(k, env, out);
  }
  if (t.is_binder()) env.pop_back();
  out += ')';
}

Term sort_connectives(const Term& t, std::vector<int>& env) {
  if (t.is(TermKind::Constant) || t.is(TermKind::Variable)) return t;
  if (t.is_binder()) {
    env.push_back(t.var_id());
    Term body = sort_connectives(t.child(0), env);
    env.pop_back();
    return rebuild_binder(t, t.var(), std::move(body));
  }
  std::vector<Term> kids;
  for (const auto& k : t.children()) {
    Term s = sort_connectives(k, env);
    if ((t.is(TermKind::And) || t.is(TermKind::Or)) && s.kind() == t.kind())
      kids.insert(kids.end(), s.children().begin(), s.children().end());
    else
      kids.push_back(std::move(s));
  }
  if (t.is(TermKind::And) || t.is(TermKind::Or)) {
    std::vector<std::pair<std::string, Term>> keyed;
    keyed.reserve(kids.size());
    for (auto& k : kids) {
      std::string key;
      debruijn(k, env, key);
      keyed.emplace_back(std::move(key), std::move(k));
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    kids.clear();
    for (auto& [key, k] : keyed) kids.push_back(std::move(k));
  }
  return rebuild(t, std::move(kids));
}

Term renumber(const Term& t, std::vector<std::pair<int, Variable>>& scope, int& counter) {
  switch (t.kind()) {
    case TermKind::Constant:
      return t;
    case TermKind::Variable:
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == t.var_id()) {
          const Variable& v = it->second;
          if (v.id == t.var_id() && v.type == t.type()) return t;
          return Term::variable(v);
        }
      return t;
    default:
      break;
  }
  if (t.is_binder()) {
    Variable v{counter++, erase_tags(t.type())};
    scope.emplace_back(t.var_id(), v);
    Term body = renumber(t.child(0), scope, counter);
    scope.pop_back();
    return rebuild_binder(t, v, std::move(body));
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& k : t.children()) kids.push_back(renumber(k, scope, counter));
  return rebuild(t, std::move(kids));
}

}  // namespace

Term canonicalize(const Term& t) {
  std::vector<int> env;
  Term sorted = sort_connectives(t, env);
  std::set<int> free = free_variables(sorted);
  int counter = free.empty() ? 0 : *free.rbegin() + 1;
  std::vector<std::pair<int, Variable>> scope;
  return renumber(sorted, scope, counter);
}

std::string canonical_key(const Term& t) { return Printer(true).print(canonicalize(t)); }

std::string debruijn_key(const Term& t) {
  std::vector<int> env;
  std::string out;
  debruijn(t, env, out);
  return out;
}

bool equivalent(const Term& a, const Term& b) { return canonical_key(normalize(a)) == canonical_key(normalize(b)); }

// ---------------------------------------------------------------------------
// Ontology

void Ontology::declare(std::string name, SemType type) {
  if (name.empty() || !std::all_of(name.begin(), name.end(), is_ident_char))
    throw DataError("invalid constant name '" + name + "'");
  if (keyword_kind(name)) throw DataError("constant name '" + name + "' is a reserved word");
  auto [it, inserted] = constants_.emplace(std::move(name), std::move(type));
  if (!inserted) throw DataError("constant '" + it->first + "' declared twice");
}

const SemType* Ontology::find(std::string_view name) const {
  auto it = constants_.find(name);
  return it == constants_.end() ? nullptr : &it->second;
}

Ontology Ontology::parse(std::string_view text) {
  Ontology ont;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw DataError("ontology line " + std::to_string(lineno) + ": expected 'name : type'");
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    try {
      ont.declare(name, parse_type(std::string_view(line).substr(colon + 1)));
    } catch (const Error& e) {
      throw DataError("ontology line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ont;
}

Ontology Ontology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ontology file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Ontology::str() const {
  std::string out;
  for (const auto& [name, type] : constants_) out += name + " : " + type.str() + "\n";
  return out;
}

}  // namespace ccglearn
