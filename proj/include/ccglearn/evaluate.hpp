#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccglearn/io.hpp"

namespace ccglearn {

struct Verdict {
  std::string sentence;
  std::string gold;
  /// Best logical form, when the sentence parses.
  std::optional<std::string> predicted;
  bool correct = false;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t parsed = 0;
  std::size_t correct = 0;
  /// correct / parsed; 0 when nothing parsed (see no_parses).
  double precision = 0.0;
  /// correct / total; 0 on an empty corpus.
  double recall = 0.0;
  bool no_parses = false;
  std::vector<Verdict> verdicts;

  std::string table() const;
  std::string json() const;
};

EvalReport evaluate(const Model& model, const Corpus& corpus, const ParserOptions& options = {});

}  // namespace ccglearn
