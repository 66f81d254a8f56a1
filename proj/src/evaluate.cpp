#include "ccglearn/evaluate.hpp"

#include <cstdio>

#include "json.hpp"

namespace ccglearn {

EvalReport evaluate(const Model& model, const Corpus& corpus, const ParserOptions& options) {
  EvalReport report;
  for (const auto& ex : corpus.examples) {
    Verdict v;
    v.sentence = join_tokens(ex.tokens);
    v.gold = print_term(ex.logical_form);
    Chart chart(ex.tokens, model.lexicon, model.params, options);
    if (auto best = best_logical_form(chart)) {
      v.predicted = print_term(best->logical_form);
      v.correct = equivalent(best->logical_form, ex.logical_form);
      ++report.parsed;
      if (v.correct) ++report.correct;
    }
    ++report.total;
    report.verdicts.push_back(std::move(v));
  }
  report.no_parses = report.parsed == 0;
  report.precision = report.parsed ? static_cast<double>(report.correct) / report.parsed : 0.0;
  report.recall = report.total ? static_cast<double>(report.correct) / report.total : 0.0;
  return report;
}

std::string EvalReport::table() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-10s %8s\n%-10s %8zu\n%-10s %8zu\n%-10s %8zu\n%-10s %8.2f%s\n%-10s %8.2f\n",
                "metric", "value", "total", total, "parsed", parsed, "correct", correct, "precision",
                100.0 * precision, no_parses ? "  (no-parses)" : "", "recall", 100.0 * recall);
  out += buf;
  return out;
}

std::string EvalReport::json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["parsed"] = parsed;
  j["correct"] = correct;
  j["precision"] = precision;
  j["recall"] = recall;
  j["no_parses"] = no_parses;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json vj;
    vj["sentence"] = v.sentence;
    vj["gold"] = v.gold;
    vj["predicted"] = v.predicted ? nlohmann::ordered_json(*v.predicted) : nlohmann::ordered_json(nullptr);
    vj["correct"] = v.correct;
    j["verdicts"].push_back(std::move(vj));
  }
  return j.dump(2) + "\n";
}

}  // namespace ccglearn
