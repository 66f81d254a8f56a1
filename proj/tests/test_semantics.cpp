#include <random>

#include "ccglearn/errors.hpp"
#include "ccglearn/semantics.hpp"
#include "doctest.h"
#include "support/oracle.hpp"

using namespace ccglearn;

namespace {

const Ontology& ont() {
  static const Ontology o = Ontology::parse(
      "a : e\nb : e\nc : e\ntexas : e:st\n"
      "p : <e,t>\nq : <e,t>\nr : <e,<e,t>>\nm : <e,r>\nstate : <e:st,t>\n");
  return o;
}

Term T(const char* text) { return parse_term(text, ont()); }

/// Random closed terms with beta redexes and a small pool of variable ids,
/// so shadowing and capture situations come up often.
class TermGen {
 public:
  explicit TermGen(unsigned seed) : rng_(seed) {}

  Term truth(int depth) { return gen_t(depth); }

 private:
  int roll(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  int fresh_id() { return 1 + roll(4); }

  Term constant(const char* name) { return Term::constant(name, *ont().find(name)); }

  /// In-scope variables not shadowed by a later binder with the same id.
  std::vector<Variable> visible(bool functions) const {
    std::vector<Variable> out;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      bool shadowed = false;
      for (std::size_t j = i + 1; j < scope_.size(); ++j) shadowed = shadowed || scope_[j].id == scope_[i].id;
      if (!shadowed && scope_[i].type.is_function() == functions) out.push_back(scope_[i]);
    }
    return out;
  }

  Term gen_e(int depth) {
    std::vector<Variable> vars = visible(false);
    const int choice = roll(depth > 0 ? 5 : 3);
    if (choice < 2 && !vars.empty()) return Term::variable(vars[roll(static_cast<int>(vars.size()))]);
    if (choice == 3) return Term::iota(gen_set(depth - 1));
    if (choice == 4) return Term::argmax(gen_set(depth - 1), constant("m"));
    static const char* names[] = {"a", "b", "c"};
    return constant(names[roll(3)]);
  }

  Term gen_set(int depth) {
    const int choice = roll(depth > 0 ? 4 : 1);
    if (choice == 0) return constant(roll(2) ? "p" : "q");
    if (choice == 3) {
      // (lambda y.lambda x.body)(arg) : <e,t>
      Variable y{fresh_id(), SemType::entity()};
      Variable x{fresh_id(), SemType::entity()};
      Term arg = gen_e(depth - 1);
      scope_.push_back(y);
      scope_.push_back(x);
      Term body = gen_t(depth - 1);
      scope_.pop_back();
      scope_.pop_back();
      return Term::apply(Term::lambda(y, Term::lambda(x, body)), arg);
    }
    Variable x{fresh_id(), SemType::entity()};
    scope_.push_back(x);
    Term body = gen_t(depth - 1);
    scope_.pop_back();
    return Term::lambda(x, body);
  }

  Term gen_t(int depth) {
    std::vector<Variable> sets = visible(true);
    const int choice = roll(depth > 0 ? 11 : 2);
    switch (choice) {
      case 0:
        return Term::apply(constant(roll(2) ? "p" : "q"), gen_e(depth - 1));
      case 1: {
        std::vector<Term> args{gen_e(depth - 1), gen_e(depth - 1)};
        return Term::apply(constant("r"), std::span<const Term>(args));
      }
      case 2:
        return Term::conj({gen_t(depth - 1), gen_t(depth - 1), gen_t(depth - 1)});
      case 3:
        return Term::disj({gen_t(depth - 1), gen_t(depth - 1)});
      case 4:
        return Term::negation(gen_t(depth - 1));
      case 5:
        return Term::implies(gen_t(depth - 1), gen_t(depth - 1));
      case 6:
      case 7: {
        Variable x{fresh_id(), SemType::entity()};
        scope_.push_back(x);
        Term body = gen_t(depth - 1);
        scope_.pop_back();
        return choice == 6 ? Term::exists(x, body) : Term::forall(x, body);
      }
      case 8: {
        // (lambda x.body)(arg)
        Variable x{fresh_id(), SemType::entity()};
        Term arg = gen_e(depth - 1);
        scope_.push_back(x);
        Term body = gen_t(depth - 1);
        scope_.pop_back();
        return Term::apply(Term::lambda(x, body), arg);
      }
      case 9: {
        // (lambda g.body)(set), with g applied inside body
        Variable g{fresh_id(), SemType::function(SemType::entity(), SemType::truth())};
        Term set = gen_set(depth - 1);
        scope_.push_back(g);
        Term body = Term::conj({Term::apply(Term::variable(g), gen_e(depth - 1)), gen_t(depth - 1)});
        scope_.pop_back();
        return Term::apply(Term::lambda(g, body), set);
      }
      default:
        if (!sets.empty()) return Term::apply(Term::variable(sets[roll(static_cast<int>(sets.size()))]), gen_e(0));
        return Term::apply(gen_set(depth - 1), gen_e(depth - 1));
    }
  }

  std::mt19937 rng_;
  std::vector<Variable> scope_;
};

}  // namespace

TEST_CASE("types parse and print") {
  CHECK(parse_type("<e,<e,t>>").str() == "<e,<e,t>>");
  CHECK(parse_type("<<e,t>,<e,r>>").str() == "<<e,t>,<e,r>>");
  CHECK(parse_type("e:st").tag() == "st");
  CHECK(accepts(parse_type("e"), parse_type("e:st")));
  CHECK(accepts(parse_type("<e:st,t>"), parse_type("<e,t>")));
  CHECK_FALSE(accepts(parse_type("<e,t>"), parse_type("<e,r>")));
  CHECK_THROWS_AS(parse_type("<e,t"), SyntaxError);
}

TEST_CASE("terms print in the documented surface syntax") {
  CHECK(print_term(T("r(a, b)")) == "r(a, b)");
  CHECK(print_term(T("lambda q:e . p(q)")) == "lambda x:e . p(x)");
  CHECK(print_term(T("lambda f:<e,t> . lambda x:e . and(f(x), p(x))")) ==
        "lambda f:<e,t> . lambda x:e . and(f(x), p(x))");
  CHECK(print_term(T("count(lambda x:e . p(x))")) == "count(lambda x:e . p(x))");
  CHECK(print_term(T("argmax(lambda x:e . p(x), lambda x:e . m(x))")) ==
        "argmax(lambda x:e . p(x), lambda y:e . m(y))");
}

TEST_CASE("type checking") {
  CHECK(type_of(T("lambda x:e . lambda y:e . r(y, x)")).str() == "<e,<e,t>>");
  CHECK(type_of(T("count(p)")).str() == "r");
  CHECK(type_of(T("argmin(p, m)")).str() == "e");
  CHECK(type_of(T("state(texas)")).str() == "t");
  CHECK(type_of(T("state(a)")).str() == "t");
  CHECK_THROWS_AS(T("p(p)"), TypeMismatch);
  CHECK_THROWS_AS(T("and(p(a), m(a))"), TypeMismatch);
  CHECK_THROWS_AS(T("r(a)(b)(c)"), TypeMismatch);
  CHECK_THROWS_AS(T("p(zzz)"), UnknownConstant);
  CHECK_THROWS_AS(T("lambda x:e . p("), SyntaxError);
}

TEST_CASE("ontology rejects duplicates and bad names") {
  Ontology o;
  o.declare("a", parse_type("e"));
  CHECK_THROWS_AS(o.declare("a", parse_type("e")), DataError);
  CHECK_THROWS_AS(o.declare("lambda", parse_type("e")), DataError);
  CHECK_THROWS_AS(Ontology::parse("a e\n"), DataError);
}

TEST_CASE("beta reduction") {
  CHECK(print_term(normalize(T("(lambda x:e . p(x))(a)"))) == "p(a)");
  CHECK(print_term(normalize(T("(lambda f:<e,t> . lambda x:e . and(f(x), q(x)))(lambda y:e . p(y))"))) ==
        "lambda x:e . and(p(x), q(x))");
  // nested conjunctions are flattened after reduction
  CHECK(print_term(normalize(T("(lambda f:<e,t> . lambda x:e . and(f(x), q(x)))(lambda y:e . and(p(y), q(y)))"))) ==
        "lambda x:e . and(p(x), q(x), q(x))");
}

TEST_CASE("substitution avoids capture") {
  // Substitute a free y into lambda y.r(x, y): the binder must be renamed.
  Variable x{1, SemType::entity()};
  Variable y{2, SemType::entity()};
  Term body = Term::lambda(y, Term::apply(Term::constant("r", *ont().find("r")),
                                          std::vector<Term>{Term::variable(x), Term::variable(y)}));
  Term result = substitute(body, x, Term::variable(y));
  // The free y must stay free: the result is lambda z.r(y, z) with y free.
  CHECK(free_variables(result) == std::set<int>{2});
  CHECK(result.var_id() != 2);
  CHECK_THROWS_AS(substitute(body, x, Term::constant("p", *ont().find("p"))), TypeMismatch);
}

TEST_CASE("normalize agrees with a de Bruijn reference reducer") {
  int reduced = 0;
  for (unsigned seed = 0; seed < 300; ++seed) {
    TermGen gen(seed);
    Term t = gen.truth(4);
    if (!(normalize(t) == t)) ++reduced;
    const std::string expected = oracle::db_print(oracle::db_normalize(oracle::to_db(t)));
    const std::string got = oracle::db_print(oracle::to_db(normalize(t)));
    INFO("seed " << seed << ": " << print_term(t));
    REQUIRE(got == expected);
  }
  CHECK(reduced > 100);
}

TEST_CASE("normalize and canonicalize preserve meaning in random finite models") {
  std::mt19937 rng(7);
  for (unsigned seed = 0; seed < 200; ++seed) {
    TermGen gen(1000 + seed);
    Term t = gen.truth(4);
    Term n = normalize(t);
    Term c = canonicalize(n);
    for (int k = 0; k < 3; ++k) {
      auto model = oracle::random_interpretation(ont(), rng);
      std::map<int, oracle::Value> env;
      const bool a = std::get<bool>(oracle::evaluate(t, model, env).v);
      const bool b = std::get<bool>(oracle::evaluate(n, model, env).v);
      const bool d = std::get<bool>(oracle::evaluate(c, model, env).v);
      INFO("seed " << seed << ": " << print_term(t));
      REQUIRE(a == b);
      REQUIRE(a == d);
    }
  }
}

TEST_CASE("print then parse round-trips up to alpha-renaming") {
  for (unsigned seed = 0; seed < 200; ++seed) {
    TermGen gen(5000 + seed);
    Term t = gen.truth(4);
    Term back = parse_term(print_term(t), ont());
    INFO(print_term(t));
    REQUIRE(debruijn_key(back) == debruijn_key(t));
    REQUIRE(oracle::db_print(oracle::to_db(back)) == oracle::db_print(oracle::to_db(t)));
  }
}

TEST_CASE("canonical keys identify alpha-variants and conjunct reorderings only") {
  CHECK(equivalent(T("lambda x:e . and(p(x), q(x))"), T("lambda y:e . and(q(y), p(y))")));
  CHECK(equivalent(T("(lambda f:<e,t> . f(a))(p)"), T("p(a)")));
  CHECK_FALSE(equivalent(T("r(a, b)"), T("r(b, a)")));
  CHECK_FALSE(equivalent(T("lambda x:e . lambda y:e . r(x, y)"), T("lambda x:e . lambda y:e . r(y, x)")));
  CHECK(canonical_key(T("lambda x:e:st . state(x)")) == canonical_key(T("lambda x:e . state(x)")));

  for (unsigned seed = 0; seed < 200; ++seed) {
    TermGen gen(9000 + seed);
    Term n = normalize(gen.truth(4));
    Term c = canonicalize(n);
    INFO(print_term(n));
    // canonicalize is idempotent and its print is the canonical key
    REQUIRE(canonical_key(c) == canonical_key(n));
    REQUIRE(print_term(c) == canonical_key(n));
    REQUIRE(canonicalize(c) == c);
    // only binder names and conjunct order may change
    REQUIRE(oracle::db_print_sorted(oracle::to_db(c)) == oracle::db_print_sorted(oracle::to_db(n)));
  }
}

namespace {

/// Shuffles and/or children and shifts every variable id.
Term scramble(const Term& t, std::mt19937& rng) {
  TermNode node = *t.node();
  if (t.is(TermKind::Variable) || t.is_binder()) node.var += 10;
  for (auto& k : node.kids) k = scramble(k, rng);
  if (t.is(TermKind::And) || t.is(TermKind::Or)) std::shuffle(node.kids.begin(), node.kids.end(), rng);
  return Term::from_node(std::move(node));
}

}  // namespace

TEST_CASE("scrambled variants are equivalent and agree in every sampled model") {
  std::mt19937 rng(11);
  for (unsigned i = 0; i < 200; ++i) {
    TermGen gen(20000 + i);
    Term a = gen.truth(4);
    Term b = scramble(a, rng);
    INFO(print_term(a) << " vs " << print_term(b));
    REQUIRE(equivalent(a, b));
    for (int k = 0; k < 3; ++k) {
      auto model = oracle::random_interpretation(ont(), rng);
      std::map<int, oracle::Value> env;
      REQUIRE(std::get<bool>(oracle::evaluate(a, model, env).v) == std::get<bool>(oracle::evaluate(b, model, env).v));
    }
  }
}

TEST_CASE("non-equivalent terms are told apart") {
  std::mt19937 rng(12);
  int distinguished = 0;
  for (unsigned i = 0; i < 200; ++i) {
    TermGen ga(40000 + i), gb(50000 + i);
    Term a = ga.truth(3), b = gb.truth(3);
    if (equivalent(a, b)) continue;
    // The keys differ; check the reference print agrees that they differ.
    const auto ka = oracle::db_print_sorted(oracle::to_db(canonicalize(normalize(a))));
    const auto kb = oracle::db_print_sorted(oracle::to_db(canonicalize(normalize(b))));
    REQUIRE(ka != kb);
    ++distinguished;
  }
  CHECK(distinguished > 100);
}
