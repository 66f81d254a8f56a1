#include "ccglearn/chart.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "ccglearn/errors.hpp"

namespace ccglearn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Relative tolerance used to decide that two log scores are tied.
bool tied(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

constexpr double kTieBreakTolerance = 1e-12;
constexpr double kParseTieTolerance = 1e-9;

bool has_unary(const ChartItem& item) {
  return std::any_of(item.backpointers.begin(), item.backpointers.end(), [](const Backpointer& bp) {
    return bp.rule == Rule::ForwardRaise || bp.rule == Rule::BackwardRaise;
  });
}

bool is_unary(Rule r) { return r == Rule::ForwardRaise || r == Rule::BackwardRaise; }

std::size_t backpointer_size(const Backpointer& bp) {
  if (bp.rule == Rule::Lexical) return 1;
  if (is_unary(bp.rule)) return bp.left->viterbi_size + 1;
  return bp.left->viterbi_size + bp.right->viterbi_size + 1;
}

void score_item(ChartItem& item) {
  item.inside_log = kNegInf;
  item.viterbi_log = kNegInf;
  item.viterbi_size = 0;
  item.best = 0;
  for (std::size_t i = 0; i < item.backpointers.size(); ++i) {
    const Backpointer& bp = item.backpointers[i];
    item.inside_log = log_sum_exp(item.inside_log, item.backpointer_inside(bp));
    const double v = item.backpointer_viterbi(bp);
    const std::size_t size = backpointer_size(bp);
    if (i == 0 || (v > item.viterbi_log && !tied(v, item.viterbi_log, kTieBreakTolerance)) ||
        (tied(v, item.viterbi_log, kTieBreakTolerance) && size < item.viterbi_size)) {
      item.viterbi_log = v;
      item.viterbi_size = size;
      item.best = i;
    }
  }
}

}  // namespace

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double ChartItem::backpointer_inside(const Backpointer& bp) const {
  if (bp.rule == Rule::Lexical) return bp.weight;
  if (is_unary(bp.rule)) return bp.left->inside_log;
  return bp.left->inside_log + bp.right->inside_log;
}

double ChartItem::backpointer_viterbi(const Backpointer& bp) const {
  if (bp.rule == Rule::Lexical) return bp.weight;
  if (is_unary(bp.rule)) return bp.left->viterbi_log;
  return bp.left->viterbi_log + bp.right->viterbi_log;
}

Chart::Chart(std::vector<std::string> tokens, const Lexicon& lexicon, const ParamVector& params,
             const ParserOptions& options)
    : tokens_(std::move(tokens)), lexicon_(&lexicon), options_(options) {
  if (options_.beam == 0) throw Error("beam width must be positive");
  const std::size_t n = tokens_.size();
  cells_.resize(n * (n + 1) / 2);
  for (std::size_t len = 1; len <= n; ++len)
    for (std::size_t start = 0; start + len <= n; ++start) fill_cell(start, start + len, params);
}

std::size_t Chart::cell_index(std::size_t start, std::size_t end) const {
  // Cells ordered by span length, then start.
  const std::size_t n = tokens_.size();
  const std::size_t len = end - start;
  const std::size_t before = (len - 1) * n - (len - 1) * (len - 2) / 2;
  return before + start;
}

const std::vector<std::unique_ptr<ChartItem>>& Chart::cell(std::size_t start, std::size_t end) const {
  static const std::vector<std::unique_ptr<ChartItem>> empty;
  if (start >= end || end > tokens_.size()) return empty;
  return cells_[cell_index(start, end)];
}

void Chart::fill_cell(std::size_t start, std::size_t end, const ParamVector& params) {
  auto& here = cells_[cell_index(start, end)];
  std::unordered_map<std::string, ChartItem*> index;

  auto add = [&](const Category& cat, const Backpointer& bp) {
    Term sem = canonicalize(cat.sem);
    std::string sem_key = print_term(sem);
    std::string key = cat.syn.str() + " : " + sem_key;
    if (auto it = index.find(key); it != index.end()) {
      it->second->backpointers.push_back(bp);
      return;
    }
    auto item = std::make_unique<ChartItem>(ChartItem{start, end, Category{cat.syn, std::move(sem)}, key,
                                                      std::move(sem_key), kNegInf, kNegInf, 0, 0, 0, {}});
    item->backpointers.push_back(bp);
    index.emplace(std::move(key), item.get());
    here.push_back(std::move(item));
  };

  const std::size_t len = end - start;
  std::span<const std::string> phrase(tokens_.data() + start, len);
  if (len <= lexicon_->max_phrase_length()) {
    for (std::size_t entry : lexicon_->entries_for(phrase)) {
      const LexicalItem& li = lexicon_->item(entry);
      if (len > options_.max_phrase_len && !li.cat().syn.is_atom("NP")) continue;
      add(li.cat(), Backpointer{Rule::Lexical, nullptr, nullptr, entry, params.weight(li.key())});
    }
  }

  for (std::size_t mid = start + 1; mid < end; ++mid) {
    const auto& lefts = cell(start, mid);
    const auto& rights = cell(mid, end);
    for (const auto& l : lefts) {
      for (const auto& r : rights) {
        if (auto c = forward_apply(l->cat, r->cat)) add(*c, {Rule::ForwardApply, l.get(), r.get()});
        if (auto c = backward_apply(l->cat, r->cat)) add(*c, {Rule::BackwardApply, l.get(), r.get()});
        if (options_.composition) {
          if (auto c = forward_compose(l->cat, r->cat)) add(*c, {Rule::ForwardCompose, l.get(), r.get()});
          if (auto c = backward_compose(l->cat, r->cat)) add(*c, {Rule::BackwardCompose, l.get(), r.get()});
        }
      }
    }
  }

  for (auto& item : here) score_item(*item);

  // A raised category needs a neighbour, so the full span is never raised.
  if (options_.type_raising && !(start == 0 && end == tokens_.size())) {
    const std::size_t base = here.size();
    for (std::size_t i = 0; i < base; ++i) {
      const ChartItem* child = here[i].get();
      for (const Raised& raised : type_raise(child->cat)) add(raised.cat, {raised.rule, child});
    }
    for (auto& item : here)
      if (has_unary(*item)) score_item(*item);
  }

  auto by_score = [](const auto& a, const auto& b) {
    if (a->viterbi_log != b->viterbi_log) return a->viterbi_log > b->viterbi_log;
    return a->key < b->key;
  };
  std::stable_sort(here.begin(), here.end(), by_score);

  if (here.size() > options_.beam) {
    std::unordered_set<const ChartItem*> kept;
    for (std::size_t i = 0; i < options_.beam; ++i) kept.insert(here[i].get());
    for (std::size_t i = 0; i < options_.beam; ++i) {
      auto& bps = here[i]->backpointers;
      const std::size_t before = bps.size();
      // Unary children always live in this same cell.
      bps.erase(std::remove_if(bps.begin(), bps.end(),
                               [&](const Backpointer& bp) { return is_unary(bp.rule) && !kept.count(bp.left); }),
                bps.end());
      if (bps.size() != before && !bps.empty()) score_item(*here[i]);
    }
    here.resize(options_.beam);
    here.erase(std::remove_if(here.begin(), here.end(), [](const auto& item) { return item->backpointers.empty(); }),
               here.end());
    std::stable_sort(here.begin(), here.end(), by_score);
  }

  for (bool unary_pass : {false, true}) {
    for (auto& item : here) {
      if (has_unary(*item) != unary_pass) continue;
      item->id = order_.size();
      order_.push_back(item.get());
    }
  }

#ifndef NDEBUG
  for (const auto& item : here) assert(type_consistent(item->cat));
#endif
}

std::optional<double> Chart::log_partition() const {
  if (root().empty()) return std::nullopt;
  double z = kNegInf;
  for (const auto& item : root()) z = log_sum_exp(z, item->inside_log);
  return z;
}

Chart build_chart(std::vector<std::string> tokens, const Lexicon& lexicon, const ParamVector& params,
                  const ParserOptions& options) {
  return Chart(std::move(tokens), lexicon, params, options);
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

struct FormMass {
  std::string key;
  double mass = kNegInf;
  const ChartItem* representative = nullptr;
};

/// Root mass per logical form, in canonical-print order.
std::vector<FormMass> root_masses(const Chart& chart) {
  std::map<std::string, FormMass> groups;
  for (const auto& item : chart.root()) {
    auto& g = groups[item->sem_key];
    g.key = item->sem_key;
    g.mass = log_sum_exp(g.mass, item->inside_log);
    if (!g.representative) g.representative = item.get();
  }
  std::vector<FormMass> out;
  for (auto& [key, g] : groups) out.push_back(g);
  return out;
}

}  // namespace

std::optional<ScoredForm> best_logical_form(const Chart& chart) {
  auto z = chart.log_partition();
  if (!z) return std::nullopt;
  const FormMass* best = nullptr;
  auto masses = root_masses(chart);
  for (const auto& g : masses)
    if (!best || (g.mass > best->mass && !tied(g.mass, best->mass, kTieBreakTolerance))) best = &g;
  return ScoredForm{best->representative->cat.sem, best->mass - *z};
}

std::vector<ScoredForm> best_logical_form_ties(const Chart& chart) {
  auto z = chart.log_partition();
  if (!z) return {};
  auto masses = root_masses(chart);
  double top = kNegInf;
  for (const auto& g : masses) top = std::max(top, g.mass);
  std::vector<ScoredForm> out;
  for (const auto& g : masses)
    if (tied(g.mass, top, kParseTieTolerance)) out.push_back({g.representative->cat.sem, g.mass - *z});
  return out;
}

std::vector<ScoredForm> logical_form_distribution(const Chart& chart) {
  auto z = chart.log_partition();
  if (!z) return {};
  auto masses = root_masses(chart);
  std::stable_sort(masses.begin(), masses.end(), [](const FormMass& a, const FormMass& b) { return a.mass > b.mass; });
  std::vector<ScoredForm> out;
  for (const auto& g : masses) out.push_back({g.representative->cat.sem, g.mass - *z});
  return out;
}

std::optional<ConstrainedBest> constrained_best(const Chart& chart, const Term& target) {
  const std::string target_key = canonical_key(normalize(target));
  std::vector<const ChartItem*> matching;
  for (const auto& item : chart.root())
    if (item->sem_key == target_key) matching.push_back(item.get());
  if (matching.empty()) return std::nullopt;

  ConstrainedBest out;
  out.score = kNegInf;
  for (const ChartItem* item : matching) out.score = std::max(out.score, item->viterbi_log);
  for (const ChartItem* item : matching)
    if (tied(item->viterbi_log, out.score, kParseTieTolerance)) out.roots.push_back(item);

  std::vector<bool> seen(chart.items().size(), false);
  std::vector<const ChartItem*> stack(out.roots.begin(), out.roots.end());
  std::set<std::size_t> entries;
  while (!stack.empty()) {
    const ChartItem* item = stack.back();
    stack.pop_back();
    if (seen[item->id]) continue;
    seen[item->id] = true;
    for (const auto& bp : item->backpointers) {
      if (!tied(item->backpointer_viterbi(bp), item->viterbi_log, kParseTieTolerance)) continue;
      if (bp.rule == Rule::Lexical) {
        entries.insert(bp.entry);
      } else {
        stack.push_back(bp.left);
        if (bp.right) stack.push_back(bp.right);
      }
    }
  }
  out.entries.assign(entries.begin(), entries.end());
  return out;
}

// ---------------------------------------------------------------------------
// Unpacking

namespace {

struct Partial {
  DerivationNode node;
  double score = 0.0;
  FeatureVector features;
};

class Unpacker {
 public:
  /// `tied_only` keeps only backpointers that reach the item's Viterbi score.
  Unpacker(const Chart& chart, bool tied_only) : chart_(chart), tied_only_(tied_only) {}

  bool keep(const ChartItem& item, const Backpointer& bp) const {
    return !tied_only_ || tied(item.backpointer_viterbi(bp), item.viterbi_log, kParseTieTolerance);
  }

  double count(const ChartItem& item) {
    if (auto it = counts_.find(&item); it != counts_.end()) return it->second;
    double total = 0;
    for (const auto& bp : item.backpointers) {
      if (!keep(item, bp)) continue;
      if (bp.rule == Rule::Lexical)
        total += 1;
      else if (!bp.right)
        total += count(*bp.left);
      else
        total += count(*bp.left) * count(*bp.right);
    }
    counts_[&item] = total;
    return total;
  }

  const std::vector<Partial>& unpack(const ChartItem& item) {
    if (auto it = memo_.find(&item); it != memo_.end()) return it->second;
    std::vector<Partial> out;
    for (const auto& bp : item.backpointers) {
      if (!keep(item, bp)) continue;
      if (bp.rule == Rule::Lexical) {
        const LexicalItem& li = chart_.lexicon().item(bp.entry);
        Partial p{DerivationNode{Rule::Lexical, item.start, item.end, item.cat, li.key(), {}}, bp.weight, {}};
        p.features[li.key()] = 1;
        out.push_back(std::move(p));
      } else if (!bp.right) {
        for (const Partial& c : unpack(*bp.left)) {
          Partial p{DerivationNode{bp.rule, item.start, item.end, item.cat, {}, {c.node}}, c.score, c.features};
          out.push_back(std::move(p));
        }
      } else {
        const auto& lefts = unpack(*bp.left);
        const auto& rights = unpack(*bp.right);
        for (const Partial& l : lefts) {
          for (const Partial& r : rights) {
            Partial p{DerivationNode{bp.rule, item.start, item.end, item.cat, {}, {l.node, r.node}},
                      l.score + r.score, l.features};
            for (const auto& [k, n] : r.features) p.features[k] += n;
            out.push_back(std::move(p));
          }
        }
      }
    }
    return memo_.emplace(&item, std::move(out)).first->second;
  }

 private:
  const Chart& chart_;
  bool tied_only_;
  std::unordered_map<const ChartItem*, double> counts_;
  std::unordered_map<const ChartItem*, std::vector<Partial>> memo_;
};

Derivation finish(const Partial& p, const ChartItem& root) {
  return Derivation{p.node, root.cat.sem, p.score, p.features};
}

Partial viterbi_partial(const Chart& chart, const ChartItem& item) {
  const Backpointer& bp = item.backpointers[item.best];
  if (bp.rule == Rule::Lexical) {
    const LexicalItem& li = chart.lexicon().item(bp.entry);
    Partial p{DerivationNode{Rule::Lexical, item.start, item.end, item.cat, li.key(), {}}, bp.weight, {}};
    p.features[li.key()] = 1;
    return p;
  }
  Partial l = viterbi_partial(chart, *bp.left);
  if (!bp.right) return Partial{DerivationNode{bp.rule, item.start, item.end, item.cat, {}, {l.node}}, l.score,
                                l.features};
  Partial r = viterbi_partial(chart, *bp.right);
  Partial p{DerivationNode{bp.rule, item.start, item.end, item.cat, {}, {l.node, r.node}}, l.score + r.score,
            l.features};
  for (const auto& [k, n] : r.features) p.features[k] += n;
  return p;
}

}  // namespace

std::vector<Derivation> parse_constrained(const Chart& chart, const Term& target) {
  auto best = constrained_best(chart, target);
  if (!best) return {};
  Unpacker unpacker(chart, true);
  double total = 0;
  for (const ChartItem* root : best->roots) total += unpacker.count(*root);
  if (total > static_cast<double>(chart.options().enumeration_cap))
    throw EnumerationLimit("tied derivation count " + std::to_string(total) + " exceeds the enumeration cap");
  std::vector<Derivation> out;
  for (const ChartItem* root : best->roots)
    for (const Partial& p : unpacker.unpack(*root)) out.push_back(finish(p, *root));
  return out;
}

std::vector<Derivation> parse_constrained(std::vector<std::string> tokens, const Term& target, const Lexicon& lexicon,
                                          const ParamVector& params, const ParserOptions& options) {
  Chart chart(std::move(tokens), lexicon, params, options);
  return parse_constrained(chart, target);
}

std::optional<Derivation> best_derivation(const Chart& chart) {
  auto form = best_logical_form(chart);
  if (!form) return std::nullopt;
  const std::string key = print_term(form->logical_form);
  const ChartItem* best = nullptr;
  for (const auto& item : chart.root()) {
    if (item->sem_key != key) continue;
    if (!best || (item->viterbi_log > best->viterbi_log && !tied(item->viterbi_log, best->viterbi_log, kTieBreakTolerance)) ||
        (tied(item->viterbi_log, best->viterbi_log, kTieBreakTolerance) && item->viterbi_size < best->viterbi_size))
      best = item.get();
  }
  return finish(viterbi_partial(chart, *best), *best);
}

double count_root_derivations(const Chart& chart) {
  Unpacker unpacker(chart, false);
  double total = 0;
  for (const auto& item : chart.root()) total += unpacker.count(*item);
  return total;
}

std::vector<Derivation> enumerate_root(const Chart& chart) {
  Unpacker unpacker(chart, false);
  double total = 0;
  for (const auto& item : chart.root()) total += unpacker.count(*item);
  if (total > static_cast<double>(chart.options().enumeration_cap))
    throw EnumerationLimit("derivation count " + std::to_string(total) + " exceeds the enumeration cap");
  std::vector<Derivation> out;
  for (const auto& item : chart.root())
    for (const Partial& p : unpacker.unpack(*item)) out.push_back(finish(p, *item));
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Box {
  std::vector<std::string> lines;
  std::size_t width = 0;
};

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

Box draw(const DerivationNode& node, const std::vector<std::string>& tokens) {
  const std::string syn = node.cat.syn.str();
  const std::string sem = print_term(node.cat.sem);
  Box box;
  if (node.rule == Rule::Lexical) {
    std::string words = join_tokens(std::span<const std::string>(tokens.data() + node.start, node.end - node.start));
    box.lines = {words, syn, sem};
  } else {
    std::vector<Box> kids;
    for (const auto& c : node.children) kids.push_back(draw(c, tokens));
    std::size_t height = 0;
    for (const auto& k : kids) height = std::max(height, k.lines.size());
    for (std::size_t row = 0; row < height; ++row) {
      std::string line;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i) line += "   ";
        line += pad(row < kids[i].lines.size() ? kids[i].lines[row] : "", kids[i].width);
      }
      box.lines.push_back(line);
    }
    std::size_t width = 0;
    for (const auto& l : box.lines) width = std::max(width, l.size());
    width = std::max({width, syn.size(), sem.size(), std::size_t{3}});
    const std::string symbol = rule_symbol(node.rule);
    const bool forward = symbol[0] == '>';
    std::string dashes(width - symbol.size(), '-');
    std::string rule_line = forward ? dashes + symbol : symbol + dashes;
    box.lines.push_back(rule_line);
    box.lines.push_back(syn);
    box.lines.push_back(sem);
  }
  for (const auto& l : box.lines) box.width = std::max(box.width, l.size());
  return box;
}

nlohmann::ordered_json to_json(const DerivationNode& node, const std::vector<std::string>& tokens) {
  nlohmann::ordered_json j;
  j["rule"] = rule_name(node.rule);
  j["span"] = {node.start, node.end};
  j["category"] = node.cat.syn.str();
  j["semantics"] = print_term(node.cat.sem);
  if (node.rule == Rule::Lexical) {
    j["words"] = join_tokens(std::span<const std::string>(tokens.data() + node.start, node.end - node.start));
    j["entry"] = node.entry;
  } else {
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : node.children) j["children"].push_back(to_json(c, tokens));
  }
  return j;
}

}  // namespace

std::string render_derivation(const Derivation& d, const std::vector<std::string>& tokens) {
  Box box = draw(d.root, tokens);
  std::string out;
  for (const auto& l : box.lines) {
    std::string trimmed = l;
    trimmed.erase(trimmed.find_last_not_of(' ') + 1);
    out += trimmed + "\n";
  }
  return out;
}

std::string derivation_json(const Derivation& d, const std::vector<std::string>& tokens) {
  nlohmann::ordered_json j = to_json(d.root, tokens);
  j["logical_form"] = print_term(d.logical_form);
  j["score"] = d.score;
  return j.dump(2);
}

}  // namespace ccglearn
