#include "ccglearn/io.hpp"

#include <fstream>
#include <sstream>

#include "ccglearn/errors.hpp"

namespace ccglearn {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Corpus parse_corpus(std::string_view text, const Ontology& ontology, std::string source) {
  Corpus corpus;
  corpus.source = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::size_t, std::string>> record;

  auto flush = [&] {
    if (record.empty()) return;
    const std::size_t index = corpus.examples.size() + 1;
    const std::string where = corpus.source + ": record " + std::to_string(index) + " (line " +
                              std::to_string(record.front().first) + ")";
    if (record.size() != 2)
      throw DataError(where + ": expected a sentence line and a logical form line, got " +
                      std::to_string(record.size()) + " lines");
    TrainingExample ex;
    ex.tokens = tokenize(record[0].second);
    if (ex.tokens.empty()) throw DataError(where + ": empty sentence");
    try {
      ex.logical_form = parse_term(record[1].second, ontology);
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
    corpus.examples.push_back(std::move(ex));
    record.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (!t.empty() && t[0] == '#') continue;
    if (t.empty()) {
      flush();
      continue;
    }
    record.emplace_back(lineno, t);
  }
  flush();
  return corpus;
}

Corpus load_corpus(const std::string& path, const Ontology& ontology) {
  return parse_corpus(read_file(path), ontology, path);
}

std::string corpus_str(const Corpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    if (i) out += "\n";
    out += join_tokens(corpus.examples[i].tokens) + "\n" + print_term(corpus.examples[i].logical_form) + "\n";
  }
  return out;
}

void write_model(const Model& model, std::ostream& out) {
  out << "[ontology]\n" << model.ontology.str() << "\n[lexicon]\n" << model.lexicon.str() << "\n[params]\n";
  model.params.write(out);
}

std::string model_str(const Model& model) {
  std::ostringstream out;
  write_model(model, out);
  return out.str();
}

Model parse_model(std::string_view text) {
  std::map<std::string, std::string> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
      current = t.substr(1, t.size() - 2);
      if (current != "ontology" && current != "lexicon" && current != "params")
        throw DataError("model file: unknown section [" + current + "]");
      if (sections.count(current)) throw DataError("model file: duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    if (current.empty()) {
      if (t.empty() || t[0] == '#') continue;
      throw DataError("model file: content before the first section");
    }
    sections[current] += line + "\n";
  }
  for (const char* name : {"ontology", "lexicon", "params"})
    if (!sections.count(name)) throw DataError(std::string("model file: missing section [") + name + "]");

  Model model;
  model.ontology = Ontology::parse(sections["ontology"]);
  model.lexicon = Lexicon::parse(sections["lexicon"], model.ontology);
  std::istringstream params(sections["params"]);
  model.params = ParamVector::read(params, model.ontology);
  return model;
}

Model load_model(const std::string& path) {
  try {
    return parse_model(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_model(model, out);
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace ccglearn
