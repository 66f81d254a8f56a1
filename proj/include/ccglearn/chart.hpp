#pragma once

// Packed CKY chart over token spans.
//
// Items in a cell are unique by (syntactic category, canonical semantics).
// Each item keeps every way it was built (backpointers) together with
// log-space inside and Viterbi scores. Since features only count lexical
// entries, packing loses nothing: a derivation's score is the sum of the
// weights of its leaves.

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccglearn/grammar.hpp"
#include "ccglearn/params.hpp"

namespace ccglearn {

inline constexpr std::size_t kUnboundedBeam = std::numeric_limits<std::size_t>::max();

struct ParserOptions {
  /// Items kept per cell, ranked by Viterbi score. kUnboundedBeam disables pruning.
  std::size_t beam = 200;
  /// Longest lexical phrase seeded into the chart. Longer lexicon phrases are
  /// still seeded when their category is NP (multi-word entity names).
  std::size_t max_phrase_len = 4;
  bool composition = true;
  bool type_raising = true;
  /// Upper bound on the number of derivations unpacked by enumerate_root.
  std::size_t enumeration_cap = 1'000'000;
};

struct ChartItem;

struct Backpointer {
  Rule rule = Rule::Lexical;
  /// Left child, or the only child of a unary rule.
  const ChartItem* left = nullptr;
  const ChartItem* right = nullptr;
  /// Lexicon index, for Rule::Lexical.
  std::size_t entry = 0;
  /// Weight of the lexical entry, for Rule::Lexical.
  double weight = 0.0;
};

struct ChartItem {
  std::size_t start = 0;
  std::size_t end = 0;
  Category cat;
  /// syn + " : " + canonical semantics; unique within a cell.
  std::string key;
  /// Canonical semantics alone; groups root items by logical form.
  std::string sem_key;
  double inside_log = -std::numeric_limits<double>::infinity();
  double viterbi_log = -std::numeric_limits<double>::infinity();
  /// Node count of the Viterbi derivation; prefers smaller trees on ties.
  std::size_t viterbi_size = 0;
  std::size_t best = 0;
  /// Position in Chart::items() (bottom-up order).
  std::size_t id = 0;
  std::vector<Backpointer> backpointers;

  double backpointer_inside(const Backpointer& bp) const;
  double backpointer_viterbi(const Backpointer& bp) const;
};

class Chart {
 public:
  Chart(std::vector<std::string> tokens, const Lexicon& lexicon, const ParamVector& params,
        const ParserOptions& options = {});

  Chart(Chart&&) = default;
  Chart& operator=(Chart&&) = default;
  Chart(const Chart&) = delete;
  Chart& operator=(const Chart&) = delete;

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t length() const { return tokens_.size(); }
  const Lexicon& lexicon() const { return *lexicon_; }
  const ParserOptions& options() const { return options_; }

  /// Items spanning [start, end), best first.
  const std::vector<std::unique_ptr<ChartItem>>& cell(std::size_t start, std::size_t end) const;
  const std::vector<std::unique_ptr<ChartItem>>& root() const { return cell(0, length()); }
  /// Every item, children before parents.
  const std::vector<const ChartItem*>& items() const { return order_; }

  /// log of the sum over all complete parses; nullopt when nothing parses.
  std::optional<double> log_partition() const;

 private:
  std::size_t cell_index(std::size_t start, std::size_t end) const;
  void fill_cell(std::size_t start, std::size_t end, const ParamVector& params);

  std::vector<std::string> tokens_;
  const Lexicon* lexicon_;
  ParserOptions options_;
  std::vector<std::vector<std::unique_ptr<ChartItem>>> cells_;
  std::vector<const ChartItem*> order_;
};

Chart build_chart(std::vector<std::string> tokens, const Lexicon& lexicon, const ParamVector& params,
                  const ParserOptions& options = {});

struct DerivationNode {
  Rule rule = Rule::Lexical;
  std::size_t start = 0;
  std::size_t end = 0;
  Category cat;
  /// Lexical item key, for leaves.
  std::string entry;
  std::vector<DerivationNode> children;
};

/// Count of each lexical item key used in a derivation.
using FeatureVector = std::map<std::string, int>;

struct Derivation {
  DerivationNode root;
  Term logical_form;
  /// Unnormalized log score, the dot product of features and weights.
  double score = 0.0;
  FeatureVector features;
};

struct ScoredForm {
  Term logical_form;
  double log_prob = 0.0;
};

/// argmax over logical forms L of sum_T P(L, T | S). Ties go to the smaller
/// canonical print of L.
std::optional<ScoredForm> best_logical_form(const Chart& chart);

/// Every logical form whose probability equals the best one (relative
/// tolerance 1e-9), in canonical-print order.
std::vector<ScoredForm> best_logical_form_ties(const Chart& chart);

/// Probability mass per logical form, sorted by descending probability.
std::vector<ScoredForm> logical_form_distribution(const Chart& chart);

/// The highest-scoring derivations with logical form `target`: the root items
/// involved, the lexical entries they use, and the shared best score.
struct ConstrainedBest {
  double score = 0.0;
  std::vector<const ChartItem*> roots;
  /// Lexicon indices used by any tied-best derivation, ascending.
  std::vector<std::size_t> entries;
};
std::optional<ConstrainedBest> constrained_best(const Chart& chart, const Term& target);

/// Every derivation of `target` tied at the maximum score (relative
/// tolerance 1e-9). Empty when `target` is not derivable.
std::vector<Derivation> parse_constrained(const Chart& chart, const Term& target);
std::vector<Derivation> parse_constrained(std::vector<std::string> tokens, const Term& target, const Lexicon& lexicon,
                                          const ParamVector& params, const ParserOptions& options = {});

/// The Viterbi derivation of the root, preferring the most probable logical
/// form's items.
std::optional<Derivation> best_derivation(const Chart& chart);

/// Unpacks every complete derivation. Throws EnumerationLimit when the count
/// exceeds options().enumeration_cap.
std::vector<Derivation> enumerate_root(const Chart& chart);

/// Number of derivations packed under the root (as a double; may be huge).
double count_root_derivations(const Chart& chart);

/// Two-row drawing: categories and semantics under each span, with a rule
/// line (`---->`, `<----`, `>B`, `<T`, ...) per combination.
std::string render_derivation(const Derivation& d, const std::vector<std::string>& tokens);
/// Nested structured-text dump (JSON).
std::string derivation_json(const Derivation& d, const std::vector<std::string>& tokens);

double log_sum_exp(double a, double b);

}  // namespace ccglearn
