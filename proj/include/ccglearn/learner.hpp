#pragma once

// Alternating lexicon induction and parameter estimation.

#include <cstddef>
#include <string>
#include <vector>

#include "ccglearn/genlex.hpp"
#include "ccglearn/io.hpp"
#include "ccglearn/model.hpp"

namespace ccglearn {

struct LearnerConfig {
  /// Outer iterations T.
  std::size_t iterations = 2;
  SgdSchedule schedule;
  ParserOptions parser;
  /// Longest word span considered by GENLEX.
  std::size_t genlex_max_len = 4;
  double seed_weight = 0.1;
  double generated_weight = 0.01;
  /// Record log-likelihood before and after each estimate call (costs two
  /// extra parses per example).
  bool track_likelihood = true;
};

struct ExampleReport {
  std::size_t genlex_size = 0;
  /// GENLEX items used by the tied-best constrained parses (0 on failure).
  std::size_t selected = 0;
  bool parsed = false;
};

struct IterationReport {
  std::vector<ExampleReport> examples;
  /// Indices of examples with no constrained parse in step 1.
  std::vector<std::size_t> failures;
  std::size_t lexicon_size = 0;
  std::size_t sgd_updates = 0;
  double likelihood_before = 0.0;
  double likelihood_after = 0.0;
};

struct TrainingReport {
  std::vector<IterationReport> iterations;
  /// Deterministic JSON rendering.
  std::string json() const;
  /// Aligned text summary.
  std::string table() const;
};

struct TrainedModel {
  Model model;
  TrainingReport report;
};

/// Weights over Lambda*: seed_weight for seed items, generated_weight for the rest.
ParamVector init_params(const Lexicon& seed, const std::vector<TrainingExample>& examples, const LearnerConfig& config);

struct Step1Result {
  /// Lambda_t: the seed lexicon plus every selected item.
  Lexicon lexicon;
  /// lambda_i per example (empty on failure).
  std::vector<Lexicon> selected;
  std::vector<ExampleReport> examples;
  std::vector<std::size_t> failures;
};

Step1Result step1_lexical_generation(const std::vector<TrainingExample>& examples, const Lexicon& seed,
                                     const ParamVector& params, const LearnerConfig& config);

/// ESTIMATE over `examples` with lexicon Lambda_t starting from `params`.
EstimateResult step2_parameter_estimation(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                                          const ParamVector& params, const LearnerConfig& config);

TrainedModel train(const std::vector<TrainingExample>& examples, const Lexicon& seed, const Ontology& ontology,
                   const LearnerConfig& config = {});

}  // namespace ccglearn
