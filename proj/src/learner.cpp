#include "ccglearn/learner.hpp"

#include <cstdio>

#include "json.hpp"

namespace ccglearn {

ParamVector init_params(const Lexicon& seed, const std::vector<TrainingExample>& examples,
                        const LearnerConfig& config) {
  ParamVector params;
  for (const auto& ex : examples) {
    CandidateSet candidates = genlex(ex.tokens, ex.logical_form, config.genlex_max_len);
    for (const auto& item : candidates.lexicon().items()) params.set(item.key(), config.generated_weight);
  }
  for (const auto& item : seed.items()) params.set(item.key(), config.seed_weight);
  return params;
}

Step1Result step1_lexical_generation(const std::vector<TrainingExample>& examples, const Lexicon& seed,
                                     const ParamVector& params, const LearnerConfig& config) {
  Step1Result out;
  out.lexicon = seed;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    CandidateSet candidates = genlex(ex.tokens, ex.logical_form, config.genlex_max_len);
    Lexicon sentence_lexicon = seed;
    sentence_lexicon.add_all(candidates.lexicon());

    ExampleReport report;
    report.genlex_size = candidates.size();
    Lexicon selected;
    Chart chart(ex.tokens, sentence_lexicon, params, config.parser);
    if (auto best = constrained_best(chart, ex.logical_form)) {
      for (std::size_t entry : best->entries) selected.add(sentence_lexicon.item(entry));
      report.parsed = true;
      for (const auto& item : selected.items())
        if (candidates.lexicon().contains(item.key())) ++report.selected;
    } else {
      out.failures.push_back(i);
    }
    out.lexicon.add_all(selected);
    out.selected.push_back(std::move(selected));
    out.examples.push_back(report);
  }
  return out;
}

EstimateResult step2_parameter_estimation(const Lexicon& lexicon, const std::vector<TrainingExample>& examples,
                                          const ParamVector& params, const LearnerConfig& config) {
  return estimate(lexicon, examples, params, config.schedule, config.parser);
}

TrainedModel train(const std::vector<TrainingExample>& examples, const Lexicon& seed, const Ontology& ontology,
                   const LearnerConfig& config) {
  TrainedModel out;
  out.model.ontology = ontology;
  out.model.lexicon = seed;
  ParamVector params = init_params(seed, examples, config);

  for (std::size_t t = 0; t < config.iterations; ++t) {
    Step1Result step1 = step1_lexical_generation(examples, seed, params, config);
    std::vector<TrainingExample> parsed;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (step1.examples[i].parsed) parsed.push_back(examples[i]);

    IterationReport report;
    report.examples = step1.examples;
    report.failures = step1.failures;
    report.lexicon_size = step1.lexicon.size();
    if (config.track_likelihood)
      report.likelihood_before = log_likelihood(step1.lexicon, parsed, params, config.parser).value;
    EstimateResult est = step2_parameter_estimation(step1.lexicon, parsed, params, config);
    params = std::move(est.params);
    report.sgd_updates = est.updates;
    if (config.track_likelihood)
      report.likelihood_after = log_likelihood(step1.lexicon, parsed, params, config.parser).value;

    out.model.lexicon = std::move(step1.lexicon);
    out.report.iterations.push_back(std::move(report));
  }
  out.model.params = std::move(params);
  return out;
}

std::string TrainingReport::json() const {
  nlohmann::ordered_json j;
  j["iterations"] = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < iterations.size(); ++t) {
    const auto& it = iterations[t];
    nlohmann::ordered_json ij;
    ij["iteration"] = t + 1;
    ij["lexicon_size"] = it.lexicon_size;
    ij["failures"] = it.failures;
    ij["sgd_updates"] = it.sgd_updates;
    ij["likelihood_before"] = format_weight(it.likelihood_before);
    ij["likelihood_after"] = format_weight(it.likelihood_after);
    ij["examples"] = nlohmann::ordered_json::array();
    for (const auto& ex : it.examples)
      ij["examples"].push_back({{"genlex", ex.genlex_size}, {"selected", ex.selected}, {"parsed", ex.parsed}});
    j["iterations"].push_back(std::move(ij));
  }
  return j.dump(2) + "\n";
}

std::string TrainingReport::table() const {
  std::string out = "iter  lexicon  failures  updates  loglik-before  loglik-after\n";
  char buf[160];
  for (std::size_t t = 0; t < iterations.size(); ++t) {
    const auto& it = iterations[t];
    std::snprintf(buf, sizeof buf, "%4zu  %7zu  %8zu  %7zu  %13.6f  %12.6f\n", t + 1, it.lexicon_size,
                  it.failures.size(), it.sgd_updates, it.likelihood_before, it.likelihood_after);
    out += buf;
  }
  return out;
}

}  // namespace ccglearn
