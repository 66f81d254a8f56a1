#pragma once

// Log-linear distribution over (logical form, derivation) pairs with lexical
// count features, and its stochastic gradient training.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ccglearn/chart.hpp"

namespace ccglearn {

struct TrainingExample {
  std::vector<std::string> tokens;
  Term logical_form;
};

/// Real-valued map from lexical item key to expected count or gradient.
using Expectation = std::map<std::string, double>;

struct SgdSchedule {
  double alpha0 = 0.1;
  double c = 0.001;
  /// Passes over the training set per call to estimate().
  std::size_t passes = 3;
  /// Optional L2 penalty, applied to the coordinates an update touches. Off by default.
  double l2 = 0.0;

  /// Step size for update number t (t = i + k*n, i counted from 1).
  double step(std::size_t t) const { return alpha0 / (1.0 + c * static_cast<double>(t)); }
};

/// f(L,T,S) . theta
double score(const Derivation& d, const ParamVector& params);
double score(const FeatureVector& features, const ParamVector& params);

/// score(d) - log Z. Throws NoParse when the chart has no complete parse.
double log_prob(const Derivation& d, const Chart& chart, const ParamVector& params);

/// E[f_j] under P(L,T | S). Throws NoParse on an empty root.
Expectation expected_features_free(const Chart& chart);
/// E[f_j] under P(T | S, L). Throws NoParse when `target` is not derivable.
Expectation expected_features_clamped(const Chart& chart, const Term& target);

/// log P(L | S) = log of the root mass of L minus log Z. Throws NoParse.
double log_prob_form(const Chart& chart, const Term& target);

/// Clamped minus free expectations for one example. Throws NoParse.
Expectation gradient(const TrainingExample& example, const Lexicon& lexicon, const ParamVector& params,
                     const ParserOptions& options = {});
Expectation gradient(const Chart& chart, const Term& target);

struct EstimateResult {
  ParamVector params;
  /// Indices of examples skipped because their logical form was not derivable,
  /// one entry per skip (so an index may repeat across passes).
  std::vector<std::size_t> skipped;
  std::size_t updates = 0;
};

/// SGD over `examples` in order. Weights of lexical items outside `lexicon`
/// are carried over from `initial` unchanged.
EstimateResult estimate(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                        const ParamVector& initial, const SgdSchedule& schedule, const ParserOptions& options = {});

struct LikelihoodResult {
  /// Sum of log P(L_i | S_i) over derivable examples.
  double value = 0.0;
  std::size_t derivable = 0;
};
LikelihoodResult log_likelihood(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                                const ParamVector& params, const ParserOptions& options = {});

}  // namespace ccglearn
