#pragma once

// Corpus and model files.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ccglearn/model.hpp"

namespace ccglearn {

/// Records separated by blank lines: the sentence, then its logical form.
/// Lines starting with `#` are ignored.
struct Corpus {
  std::vector<TrainingExample> examples;
  std::string source;
};

Corpus parse_corpus(std::string_view text, const Ontology& ontology, std::string source = "<string>");
Corpus load_corpus(const std::string& path, const Ontology& ontology);
std::string corpus_str(const Corpus& corpus);

/// Lexicon plus weights, with the ontology needed to read them back.
struct Model {
  Ontology ontology;
  Lexicon lexicon;
  ParamVector params;
};

/// Sections `[ontology]`, `[lexicon]`, `[params]`.
void write_model(const Model& model, std::ostream& out);
std::string model_str(const Model& model);
Model parse_model(std::string_view text);
Model load_model(const std::string& path);
void save_model(const Model& model, const std::string& path);

std::string read_file(const std::string& path);

}  // namespace ccglearn
