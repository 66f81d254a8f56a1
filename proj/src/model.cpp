#include "ccglearn/model.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "ccglearn/errors.hpp"

namespace ccglearn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_unary(Rule r) { return r == Rule::ForwardRaise || r == Rule::BackwardRaise; }

/// Inside-outside over the chart with the root restricted by `keep_root`.
/// Returns expectations normalized by the retained root mass.
Expectation expectations(const Chart& chart, const std::function<bool(const ChartItem&)>& keep_root) {
  const auto& items = chart.items();
  std::vector<double> outside(items.size(), kNegInf);
  double z = kNegInf;
  for (const auto& root : chart.root()) {
    if (!keep_root(*root)) continue;
    outside[root->id] = 0.0;
    z = log_sum_exp(z, root->inside_log);
  }
  if (z == kNegInf) throw NoParse("no derivation reaches the requested root");

  Expectation out;
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    const ChartItem& item = **it;
    const double o = outside[item.id];
    if (o == kNegInf) continue;
    for (const auto& bp : item.backpointers) {
      if (bp.rule == Rule::Lexical) {
        const std::string& key = chart.lexicon().item(bp.entry).key();
        out[key] += std::exp(o + bp.weight - z);
      } else if (is_unary(bp.rule)) {
        outside[bp.left->id] = log_sum_exp(outside[bp.left->id], o);
      } else {
        outside[bp.left->id] = log_sum_exp(outside[bp.left->id], o + bp.right->inside_log);
        outside[bp.right->id] = log_sum_exp(outside[bp.right->id], o + bp.left->inside_log);
      }
    }
  }
  return out;
}

double root_mass(const Chart& chart, const std::string& sem_key) {
  double mass = kNegInf;
  for (const auto& root : chart.root())
    if (root->sem_key == sem_key) mass = log_sum_exp(mass, root->inside_log);
  return mass;
}

}  // namespace

double score(const FeatureVector& features, const ParamVector& params) {
  double s = 0.0;
  for (const auto& [key, n] : features) s += n * params.weight(key);
  return s;
}

double score(const Derivation& d, const ParamVector& params) { return score(d.features, params); }

double log_prob(const Derivation& d, const Chart& chart, const ParamVector& params) {
  auto z = chart.log_partition();
  if (!z) throw NoParse("distribution undefined: the sentence has no parse");
  return score(d, params) - *z;
}

Expectation expected_features_free(const Chart& chart) {
  return expectations(chart, [](const ChartItem&) { return true; });
}

Expectation expected_features_clamped(const Chart& chart, const Term& target) {
  const std::string key = canonical_key(normalize(target));
  return expectations(chart, [&](const ChartItem& root) { return root.sem_key == key; });
}

double log_prob_form(const Chart& chart, const Term& target) {
  auto z = chart.log_partition();
  if (!z) throw NoParse("distribution undefined: the sentence has no parse");
  const double mass = root_mass(chart, canonical_key(normalize(target)));
  if (mass == kNegInf) throw NoParse("logical form not derivable: " + print_term(target));
  return mass - *z;
}

Expectation gradient(const Chart& chart, const Term& target) {
  Expectation g = expected_features_clamped(chart, target);
  for (const auto& [key, v] : expected_features_free(chart)) g[key] -= v;
  return g;
}

Expectation gradient(const TrainingExample& example, const Lexicon& lexicon, const ParamVector& params,
                     const ParserOptions& options) {
  Chart chart(example.tokens, lexicon, params, options);
  return gradient(chart, example.logical_form);
}

EstimateResult estimate(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                        const ParamVector& initial, const SgdSchedule& schedule, const ParserOptions& options) {
  EstimateResult result{initial, {}, 0};
  ParamVector& params = result.params;
  const std::size_t n = examples.size();
  for (std::size_t k = 0; k < schedule.passes; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      Chart chart(examples[i].tokens, lexicon, params, options);
      Expectation g;
      try {
        g = gradient(chart, examples[i].logical_form);
      } catch (const NoParse&) {
        result.skipped.push_back(i);
        continue;
      }
      const double step = schedule.step(i + 1 + k * n);
      for (const auto& [key, v] : g) {
        double w = params.weight(key);
        params.set(key, w + step * (v - schedule.l2 * w));
      }
      ++result.updates;
    }
  }
  return result;
}

LikelihoodResult log_likelihood(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                                const ParamVector& params, const ParserOptions& options) {
  LikelihoodResult out;
  for (const auto& ex : examples) {
    Chart chart(ex.tokens, lexicon, params, options);
    try {
      out.value += log_prob_form(chart, ex.logical_form);
      ++out.derivable;
    } catch (const NoParse&) {
    }
  }
  return out;
}

}  // namespace ccglearn
