#pragma once

// Candidate lexical items: every word span paired with every category that a
// trigger rule reads off the logical form.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ccglearn/grammar.hpp"

namespace ccglearn {

/// Contiguous token spans of length 1..max_len, in order of start then length.
std::vector<std::vector<std::string>> word_spans(const std::vector<std::string>& tokens, std::size_t max_len);

struct GeneratedCategory {
  Category cat;
  /// Trigger rule, 1 to 10.
  int rule = 0;
  /// Printed sub-term that fired the rule.
  std::string trigger;
  /// Whether the category satisfies the syntax/semantics type mapping.
  /// Rule 8 produces an ill-typed category; it is reported but never used.
  bool consistent = true;
};

/// Every category produced by every trigger rule on `logical_form`, deduplicated
/// by (rule, category) and ordered by rule then printed category.
std::vector<GeneratedCategory> categories(const Term& logical_form);

struct Provenance {
  int rule = 0;
  std::string trigger;
};

class CandidateSet {
 public:
  void add(LexicalItem item, Provenance source);

  const Lexicon& lexicon() const { return lexicon_; }
  std::size_t size() const { return lexicon_.size(); }
  /// Every rule that produced the item (an item can be triggered twice).
  const std::vector<Provenance>& provenance(const std::string& key) const { return provenance_.at(key); }

 private:
  Lexicon lexicon_;
  std::map<std::string, std::vector<Provenance>> provenance_;
};

/// W(S) x C(L), skipping type-inconsistent categories.
CandidateSet genlex(const std::vector<std::string>& tokens, const Term& logical_form, std::size_t max_len = 4);

}  // namespace ccglearn
