#include "ccglearn/genlex.hpp"

#include <algorithm>
#include <set>

namespace ccglearn {

std::vector<std::vector<std::string>> word_spans(const std::vector<std::string>& tokens, std::size_t max_len) {
  std::vector<std::vector<std::string>> out;
  std::set<std::vector<std::string>> seen;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t len = 1; len <= max_len && i + len <= tokens.size(); ++len) {
      std::vector<std::string> span(tokens.begin() + i, tokens.begin() + i + len);
      if (seen.insert(span).second) out.push_back(std::move(span));
    }
  }
  return out;
}

namespace {

bool is_truth(const SemType& t) { return t.kind() == SemType::Kind::Truth; }

bool arity_one_predicate(const SemType& t) {
  return t.is_function() && t.arg().is_entity() && is_truth(t.result());
}

bool arity_two_predicate(const SemType& t) {
  return t.is_function() && t.arg().is_entity() && arity_one_predicate(t.result());
}

/// Arity-one function returning something other than a truth value.
bool arity_one_function(const SemType& t) {
  if (!t.is_function() || !t.arg().is_entity()) return false;
  const SemType r = t.result();
  return r.is_entity() || r.kind() == SemType::Kind::Real;
}

bool numeric_function(const SemType& t) {
  return t.is_function() && t.arg().is_entity() && t.result().kind() == SemType::Kind::Real;
}

Term var(const Variable& v) { return Term::variable(v); }

Term call(const Term& fn, std::initializer_list<Term> args) {
  std::vector<Term> a(args);
  return Term::apply(fn, std::span<const Term>(a));
}

SemType set_type() { return SemType::function(SemType::entity(), SemType::truth()); }

/// The constant f when `measure` is f itself or lambda x.f(x).
const Term* measure_function(const Term& measure) {
  if (measure.is(TermKind::Constant)) return &measure;
  if (!measure.is(TermKind::Lambda)) return nullptr;
  const Term& body = measure.child(0);
  if (!body.is(TermKind::Apply)) return nullptr;
  const Term& fn = body.child(0);
  const Term& arg = body.child(1);
  if (!fn.is(TermKind::Constant) || !arg.is(TermKind::Variable) || arg.var_id() != measure.var_id()) return nullptr;
  return &fn;
}

class Collector {
 public:
  void walk(const Term& t) {
    switch (t.kind()) {
      case TermKind::Constant:
        constants_.emplace(t.name(), t);
        break;
      case TermKind::Apply:
        literal(t);
        break;
      case TermKind::Argmax:
      case TermKind::Argmin:
        superlative(t);
        break;
      default:
        break;
    }
    for (const auto& c : t.children()) walk(c);
  }

  std::vector<GeneratedCategory> finish() {
    for (const auto& [name, c] : constants_) constant_rules(c);
    std::sort(out_.begin(), out_.end(), [](const GeneratedCategory& a, const GeneratedCategory& b) {
      if (a.rule != b.rule) return a.rule < b.rule;
      return a.cat.str() < b.cat.str();
    });
    std::vector<GeneratedCategory> unique;
    std::set<std::pair<int, std::string>> seen;
    for (auto& g : out_)
      if (seen.emplace(g.rule, g.cat.str()).second) unique.push_back(std::move(g));
    return unique;
  }

 private:
  void emit(int rule, const std::string& trigger, SynCat syn, const Term& sem) {
    Category cat{std::move(syn), canonicalize(normalize(sem))};
    const bool ok = type_consistent(cat);
    out_.push_back({std::move(cat), rule, trigger, ok});
  }

  void constant_rules(const Term& c) {
    const SemType& type = c.type();
    const std::string& name = c.name();
    const SynCat S = SynCat::S(), NP = SynCat::NP(), N = SynCat::N();
    const Variable g{1, set_type()};
    if (type.is_entity()) emit(1, name, NP, c);
    if (arity_one_predicate(type)) {
      const Variable x{2, type.arg()};
      const Term px = call(c, {var(x)});
      emit(2, name, N, Term::lambda(x, px));
      emit(3, name, SynCat::backward(S, NP), Term::lambda(x, px));
      emit(6, name, SynCat::forward(N, N), Term::lambda(g, Term::lambda(x, Term::conj({px, call(var(g), {var(x)})}))));
    }
    if (arity_two_predicate(type)) {
      const Variable x{2, type.arg()};
      const Variable y{3, type.result().arg()};
      const SynCat tv = SynCat::forward(SynCat::backward(S, NP), NP);
      emit(4, name, tv, Term::lambda(x, Term::lambda(y, call(c, {var(y), var(x)}))));
      emit(5, name, tv, Term::lambda(x, Term::lambda(y, call(c, {var(x), var(y)}))));
      // Binder order as in the example column: lambda g.lambda x.lambda y.
      emit(8, name, SynCat::forward(SynCat::backward(N, N), NP),
           Term::lambda(g, Term::lambda(x, Term::lambda(y, Term::conj({call(c, {var(x), var(y)}),
                                                                       call(var(g), {var(x)})})))));
    }
    if (numeric_function(type)) {
      const Variable x{2, type.arg()};
      emit(10, name, SynCat::forward(S, NP), Term::lambda(x, call(c, {var(x)})));
    }
  }

  // p(a, c) with p an arity-two predicate and c an entity constant.
  void literal(const Term& t) {
    const Term& inner = t.child(0);
    const Term& c = t.child(1);
    if (!inner.is(TermKind::Apply) || !c.is(TermKind::Constant) || !c.type().is_entity()) return;
    const Term& p = inner.child(0);
    if (!p.is(TermKind::Constant) || !arity_two_predicate(p.type())) return;
    const Variable g{1, set_type()};
    const Variable x{2, p.type().arg()};
    emit(7, print_term(t), SynCat::forward(SynCat::N(), SynCat::N()),
         Term::lambda(g, Term::lambda(x, Term::conj({call(p, {var(x), c}), call(var(g), {var(x)})}))));
  }

  void superlative(const Term& t) {
    const Term* f = measure_function(t.child(1));
    if (!f || !arity_one_function(f->type())) return;
    const Variable g{1, set_type()};
    const Variable x{2, f->type().arg()};
    const Term measure = Term::lambda(x, call(*f, {var(x)}));
    const Term body = t.is(TermKind::Argmax) ? Term::argmax(var(g), measure) : Term::argmin(var(g), measure);
    emit(9, print_term(t), SynCat::forward(SynCat::NP(), SynCat::N()), Term::lambda(g, body));
  }

  std::map<std::string, Term> constants_;
  std::vector<GeneratedCategory> out_;
};

}  // namespace

std::vector<GeneratedCategory> categories(const Term& logical_form) {
  Collector collector;
  collector.walk(normalize(logical_form));
  return collector.finish();
}

void CandidateSet::add(LexicalItem item, Provenance source) {
  auto& sources = provenance_[item.key()];
  const bool duplicate = std::any_of(sources.begin(), sources.end(), [&](const Provenance& p) {
    return p.rule == source.rule && p.trigger == source.trigger;
  });
  if (!duplicate) sources.push_back(std::move(source));
  lexicon_.add(std::move(item));
}

CandidateSet genlex(const std::vector<std::string>& tokens, const Term& logical_form, std::size_t max_len) {
  CandidateSet out;
  const auto cats = categories(logical_form);
  for (const auto& phrase : word_spans(tokens, max_len))
    for (const auto& g : cats)
      if (g.consistent) out.add(LexicalItem(phrase, g.cat), {g.rule, g.trigger});
  return out;
}

}  // namespace ccglearn
