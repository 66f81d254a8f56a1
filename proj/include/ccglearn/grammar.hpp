#pragma once

// CCG categories, combinators and the lexicon.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccglearn/semantics.hpp"

namespace ccglearn {

/// Syntactic category: an atom (S, NP, N) or a slash category.
class SynCat {
 public:
  enum class Kind { Atom, Forward, Backward };

  /// Empty handle; only assignment is valid on it.
  SynCat() = default;

  static SynCat atom(std::string name);
  static SynCat S() { return atom("S"); }
  static SynCat NP() { return atom("NP"); }
  static SynCat N() { return atom("N"); }
  /// result/arg
  static SynCat forward(SynCat result, SynCat arg);
  /// result\arg
  static SynCat backward(SynCat result, SynCat arg);

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_atom(std::string_view name) const { return is_atom() && node_->name == name; }
  const std::string& name() const { return node_->name; }
  const SynCat& result() const { return *node_->result; }
  const SynCat& arg() const { return *node_->arg; }

  std::string str() const;

  friend bool operator==(const SynCat& a, const SynCat& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const SynCat> result;
    std::shared_ptr<const SynCat> arg;
  };
  explicit SynCat(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Slashes associate to the left: `S\NP/NP` is `(S\NP)/NP`.
SynCat parse_syncat(std::string_view text);

/// A : f
struct Category {
  SynCat syn;
  Term sem;

  std::string str() const { return syn.str() + " : " + print_term(sem); }
};

/// Strict semantic type of a syntactic category: S->t, NP->e, N-><e,t>,
/// A/B and A\B -> <type(B),type(A)>.
SemType semantic_type(const SynCat& syn);

/// Whether `type` may serve as the semantics of `syn`. S additionally admits
/// <e,t> (wh-questions) and r (numeric questions); entity subtypes are loose.
bool type_consistent(const SynCat& syn, const SemType& type);
bool type_consistent(const Category& cat);

enum class Rule {
  Lexical,
  ForwardApply,
  BackwardApply,
  ForwardCompose,
  BackwardCompose,
  ForwardRaise,
  BackwardRaise,
};

const char* rule_name(Rule rule);
/// Arrow label used in derivation drawings: ">", "<", ">B", "<B", ">T", "<T".
const char* rule_symbol(Rule rule);

// Combinators. Each returns the combined category with normalized semantics,
// or nothing when the syntactic sides do not match or the semantic
// application does not type-check.
std::optional<Category> forward_apply(const Category& left, const Category& right);
std::optional<Category> backward_apply(const Category& left, const Category& right);
std::optional<Category> forward_compose(const Category& left, const Category& right);
std::optional<Category> backward_compose(const Category& left, const Category& right);

struct Raised {
  Rule rule;
  Category cat;
};
/// NP : f  =>  S/(S\NP) : lambda g.g(f)  and  S\(S/NP) : lambda g.g(f).
std::vector<Raised> type_raise(const Category& cat);

/// Lowercased whitespace tokenization.
std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

/// phrase := category. Semantics are stored normalized and canonicalized, so
/// alphabetic variants have the same key.
class LexicalItem {
 public:
  LexicalItem(std::vector<std::string> phrase, Category cat);

  const std::vector<std::string>& phrase() const { return phrase_; }
  const Category& cat() const { return cat_; }
  /// Identity used for features and parameters; also the lexicon file line.
  const std::string& key() const { return key_; }

  friend bool operator==(const LexicalItem& a, const LexicalItem& b) { return a.key_ == b.key_; }

 private:
  std::vector<std::string> phrase_;
  Category cat_;
  std::string key_;
};

/// Parses `<phrase> := <syncat> : <term>`.
LexicalItem parse_lexical_item(std::string_view line, const Ontology& ontology);

class Lexicon {
 public:
  /// Returns false if an item with the same key is already present.
  bool add(LexicalItem item);
  void add_all(const Lexicon& other);

  bool contains(const std::string& key) const { return index_.count(key) != 0; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<LexicalItem>& items() const { return items_; }
  const LexicalItem& item(std::size_t i) const { return items_[i]; }
  std::optional<std::size_t> find(const std::string& key) const;

  /// Indices of entries whose phrase is exactly `tokens`, ordered by key.
  std::span<const std::size_t> entries_for(std::span<const std::string> tokens) const;
  /// Categories for `tokens`, ordered by their printed form.
  std::vector<Category> lookup(std::span<const std::string> tokens) const;

  std::size_t max_phrase_length() const { return max_phrase_length_; }

  static Lexicon parse(std::string_view text, const Ontology& ontology);
  static Lexicon load(const std::string& path, const Ontology& ontology);
  /// One line per item, in insertion order.
  std::string str() const;

 private:
  std::vector<LexicalItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::vector<std::string>, std::vector<std::size_t>> by_phrase_;
  std::size_t max_phrase_length_ = 0;
};

}  // namespace ccglearn
