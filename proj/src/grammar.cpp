#include "ccglearn/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ccglearn/errors.hpp"

namespace ccglearn {

SynCat SynCat::atom(std::string name) {
  return SynCat(std::make_shared<const Node>(Node{Kind::Atom, std::move(name), nullptr, nullptr}));
}

SynCat SynCat::forward(SynCat result, SynCat arg) {
  return SynCat(std::make_shared<const Node>(Node{Kind::Forward, {}, std::make_shared<const SynCat>(std::move(result)),
                                                  std::make_shared<const SynCat>(std::move(arg))}));
}

SynCat SynCat::backward(SynCat result, SynCat arg) {
  return SynCat(std::make_shared<const Node>(Node{Kind::Backward, {},
                                                  std::make_shared<const SynCat>(std::move(result)),
                                                  std::make_shared<const SynCat>(std::move(arg))}));
}

std::string SynCat::str() const {
  if (is_atom()) return name();
  auto part = [](const SynCat& c) { return c.is_atom() ? c.str() : "(" + c.str() + ")"; };
  return part(result()) + (kind() == Kind::Forward ? "/" : "\\") + part(arg());
}

bool operator==(const SynCat& a, const SynCat& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_atom()) return a.name() == b.name();
  return a.result() == b.result() && a.arg() == b.arg();
}

namespace {

class SynReader {
 public:
  explicit SynReader(std::string_view text) : text_(text) {}

  SynCat parse() {
    SynCat c = slashed();
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "unexpected trailing input in category");
    return c;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  SynCat slashed() {
    SynCat left = primary();
    while (true) {
      skip();
      if (pos_ >= text_.size()) return left;
      char c = text_[pos_];
      if (c != '/' && c != '\\') return left;
      ++pos_;
      SynCat right = primary();
      left = c == '/' ? SynCat::forward(left, right) : SynCat::backward(left, right);
    }
  }

  SynCat primary() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      SynCat inner = slashed();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw SyntaxError(pos_, "expected ')' in category");
      ++pos_;
      return inner;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (name != "S" && name != "NP" && name != "N")
      throw SyntaxError(start, "unknown atomic category '" + std::string(name) + "'");
    return SynCat::atom(std::string(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SynCat parse_syncat(std::string_view text) { return SynReader(text).parse(); }

SemType semantic_type(const SynCat& syn) {
  if (syn.is_atom("S")) return SemType::truth();
  if (syn.is_atom("NP")) return SemType::entity();
  if (syn.is_atom("N")) return SemType::function(SemType::entity(), SemType::truth());
  return SemType::function(semantic_type(syn.arg()), semantic_type(syn.result()));
}

bool type_consistent(const SynCat& syn, const SemType& type) {
  if (syn.is_atom("S")) {
    if (type.kind() == SemType::Kind::Truth || type.kind() == SemType::Kind::Real) return true;
    return accepts(semantic_type(SynCat::N()), type);
  }
  if (syn.is_atom()) return accepts(semantic_type(syn), type);
  return type.is_function() && type_consistent(syn.arg(), type.arg()) && type_consistent(syn.result(), type.result());
}

bool type_consistent(const Category& cat) {
  try {
    return type_consistent(cat.syn, type_of(cat.sem));
  } catch (const TypeMismatch&) {
    return false;
  }
}

const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::Lexical: return "lex";
    case Rule::ForwardApply: return "fapply";
    case Rule::BackwardApply: return "bapply";
    case Rule::ForwardCompose: return "fcomp";
    case Rule::BackwardCompose: return "bcomp";
    case Rule::ForwardRaise: return "fraise";
    case Rule::BackwardRaise: return "braise";
  }
  return "";
}

const char* rule_symbol(Rule rule) {
  switch (rule) {
    case Rule::Lexical: return "";
    case Rule::ForwardApply: return ">";
    case Rule::BackwardApply: return "<";
    case Rule::ForwardCompose: return ">B";
    case Rule::BackwardCompose: return "<B";
    case Rule::ForwardRaise: return ">T";
    case Rule::BackwardRaise: return "<T";
  }
  return "";
}

namespace {

std::optional<SemType> checked_type(const Term& t) {
  try {
    return type_of(t);
  } catch (const TypeMismatch&) {
    return std::nullopt;
  }
}

/// fn(arg) in normal form, if the application type-checks.
std::optional<Term> apply_checked(const Term& fn, const Term& arg) {
  auto fn_type = checked_type(fn);
  auto arg_type = checked_type(arg);
  if (!fn_type || !arg_type || !fn_type->is_function() || !accepts(fn_type->arg(), *arg_type)) return std::nullopt;
  return normalize(Term::apply(fn, arg));
}

/// lambda x.f(g(x)) in normal form, if it type-checks.
std::optional<Term> compose_checked(const Term& f, const Term& g) {
  auto f_type = checked_type(f);
  auto g_type = checked_type(g);
  if (!f_type || !g_type || !f_type->is_function() || !g_type->is_function()) return std::nullopt;
  if (!accepts(f_type->arg(), g_type->result())) return std::nullopt;
  Variable x{std::max(max_variable_id(f), max_variable_id(g)) + 1, g_type->arg()};
  return normalize(Term::lambda(x, Term::apply(f, Term::apply(g, Term::variable(x)))));
}

}  // namespace

std::optional<Category> forward_apply(const Category& left, const Category& right) {
  if (left.syn.kind() != SynCat::Kind::Forward || !(left.syn.arg() == right.syn)) return std::nullopt;
  auto sem = apply_checked(left.sem, right.sem);
  if (!sem) return std::nullopt;
  return Category{left.syn.result(), std::move(*sem)};
}

std::optional<Category> backward_apply(const Category& left, const Category& right) {
  if (right.syn.kind() != SynCat::Kind::Backward || !(right.syn.arg() == left.syn)) return std::nullopt;
  auto sem = apply_checked(right.sem, left.sem);
  if (!sem) return std::nullopt;
  return Category{right.syn.result(), std::move(*sem)};
}

std::optional<Category> forward_compose(const Category& left, const Category& right) {
  // A/B : f   B/C : g   =>   A/C : lambda x.f(g(x))
  if (left.syn.kind() != SynCat::Kind::Forward || right.syn.kind() != SynCat::Kind::Forward) return std::nullopt;
  if (!(left.syn.arg() == right.syn.result())) return std::nullopt;
  auto sem = compose_checked(left.sem, right.sem);
  if (!sem) return std::nullopt;
  return Category{SynCat::forward(left.syn.result(), right.syn.arg()), std::move(*sem)};
}

std::optional<Category> backward_compose(const Category& left, const Category& right) {
  // B\C : g   A\B : f   =>   A\C : lambda x.f(g(x))
  if (left.syn.kind() != SynCat::Kind::Backward || right.syn.kind() != SynCat::Kind::Backward) return std::nullopt;
  if (!(right.syn.arg() == left.syn.result())) return std::nullopt;
  auto sem = compose_checked(right.sem, left.sem);
  if (!sem) return std::nullopt;
  return Category{SynCat::backward(right.syn.result(), left.syn.arg()), std::move(*sem)};
}

std::vector<Raised> type_raise(const Category& cat) {
  if (!cat.syn.is_atom("NP")) return {};
  const SynCat s = SynCat::S();
  const SynCat vp = SynCat::backward(s, SynCat::NP());
  const SynCat vt = SynCat::forward(s, SynCat::NP());
  auto raise = [&](const SynCat& verb) {
    Variable g{max_variable_id(cat.sem) + 1, semantic_type(verb)};
    return Term::lambda(g, Term::apply(Term::variable(g), cat.sem));
  };
  return {
      {Rule::ForwardRaise, {SynCat::forward(s, vp), raise(vp)}},
      {Rule::BackwardRaise, {SynCat::backward(s, vt), raise(vt)}},
  };
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

LexicalItem::LexicalItem(std::vector<std::string> phrase, Category cat)
    : phrase_(std::move(phrase)), cat_{std::move(cat.syn), canonicalize(normalize(cat.sem))} {
  if (phrase_.empty()) throw Error("lexical item with an empty phrase");
  key_ = join_tokens(phrase_) + " := " + cat_.syn.str() + " : " + canonical_key(cat_.sem);
}

LexicalItem parse_lexical_item(std::string_view line, const Ontology& ontology) {
  auto assign = line.find(":=");
  if (assign == std::string_view::npos) throw DataError("expected ':=' in lexical entry");
  auto phrase = tokenize(line.substr(0, assign));
  if (phrase.empty()) throw DataError("empty phrase in lexical entry");
  std::string_view rest = line.substr(assign + 2);
  auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw DataError("expected ':' between category and semantics");
  SynCat syn = parse_syncat(rest.substr(0, colon));
  Term sem = parse_term(rest.substr(colon + 1), ontology);
  SemType type = type_of(sem, ontology);
  if (!type_consistent(syn, type))
    throw TypeMismatch("semantics of type " + type.str() + " do not fit category " + syn.str());
  return LexicalItem(std::move(phrase), Category{std::move(syn), std::move(sem)});
}

bool Lexicon::add(LexicalItem item) {
  if (index_.count(item.key())) return false;
  const std::size_t i = items_.size();
  index_.emplace(item.key(), i);
  auto& bucket = by_phrase_[item.phrase()];
  bucket.push_back(i);
  max_phrase_length_ = std::max(max_phrase_length_, item.phrase().size());
  items_.push_back(std::move(item));
  std::sort(bucket.begin(), bucket.end(),
            [this](std::size_t a, std::size_t b) { return items_[a].key() < items_[b].key(); });
  return true;
}

void Lexicon::add_all(const Lexicon& other) {
  for (const auto& item : other.items()) add(item);
}

std::optional<std::size_t> Lexicon::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> Lexicon::entries_for(std::span<const std::string> tokens) const {
  auto it = by_phrase_.find(std::vector<std::string>(tokens.begin(), tokens.end()));
  if (it == by_phrase_.end()) return {};
  return it->second;
}

std::vector<Category> Lexicon::lookup(std::span<const std::string> tokens) const {
  std::vector<Category> out;
  for (std::size_t i : entries_for(tokens)) out.push_back(items_[i].cat());
  std::sort(out.begin(), out.end(), [](const Category& a, const Category& b) { return a.str() < b.str(); });
  return out;
}

Lexicon Lexicon::parse(std::string_view text, const Ontology& ontology) {
  Lexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      lex.add(parse_lexical_item(line, ontology));
    } catch (const Error& e) {
      throw DataError("lexicon line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path, const Ontology& ontology) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), ontology);
}

std::string Lexicon::str() const {
  std::string out;
  for (const auto& item : items_) out += item.key() + "\n";
  return out;
}

}  // namespace ccglearn
