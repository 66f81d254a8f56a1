// ccglearn: train, parse, evaluate and inspect PCCG semantic parsers.

#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "ccglearn/errors.hpp"
#include "ccglearn/evaluate.hpp"
#include "ccglearn/genlex.hpp"
#include "ccglearn/io.hpp"
#include "ccglearn/learner.hpp"

using namespace ccglearn;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct Reference {
  const char* name;
  double precision;
  double recall;
};

// Published full-data results, printed for comparison only.
constexpr Reference kReferences[] = {{"geo880", 96.25, 79.29}, {"jobs640", 97.36, 79.29}};

struct GlobalFlags {
  std::size_t beam = 200;
  std::size_t max_phrase_len = 4;
  std::size_t iterations = 2;
  std::size_t sgd_passes = 3;
  double alpha0 = 0.1;
  double c = 0.001;
  unsigned seed = 0;
};

ParserOptions parser_options(const GlobalFlags& g) {
  ParserOptions opts;
  opts.beam = g.beam == 0 ? kUnboundedBeam : g.beam;
  opts.max_phrase_len = g.max_phrase_len;
  return opts;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn and apply probabilistic CCG semantic parsers"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--beam", g.beam, "Items kept per chart cell (0 = unbounded)")->capture_default_str();
  app.add_option("--max-phrase-len", g.max_phrase_len, "Longest lexical phrase")->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--iterations", g.iterations, "Outer learning iterations")->capture_default_str();
  app.add_option("--sgd-passes", g.sgd_passes, "SGD passes per estimate")->capture_default_str();
  app.add_option("--alpha0", g.alpha0, "Initial learning rate")->capture_default_str();
  app.add_option("--c", g.c, "Learning-rate decay")->capture_default_str();
  app.add_option("--seed", g.seed, "Reserved; training is deterministic")->capture_default_str();

  std::string corpus_path, ontology_path, lexicon_path, model_path, report_path, sentence, reference;
  bool derivation = false, json = false, ties = false;

  auto* train_cmd = app.add_subcommand("train", "Learn a lexicon and weights");
  train_cmd->add_option("corpus", corpus_path)->required();
  train_cmd->add_option("ontology", ontology_path)->required();
  train_cmd->add_option("init-lexicon", lexicon_path)->required();
  train_cmd->add_option("-o,--output", model_path, "Model file to write")->required();
  train_cmd->add_option("--report", report_path, "Write the training report (JSON) here");

  auto* parse_cmd = app.add_subcommand("parse", "Print the most probable logical form");
  parse_cmd->add_option("model", model_path)->required();
  parse_cmd->add_option("sentence", sentence)->required();
  parse_cmd->add_flag("--derivation", derivation, "Also draw the best derivation");
  parse_cmd->add_flag("--json", json, "Dump the best derivation as JSON");
  parse_cmd->add_flag("--k-best-ties", ties, "Print every logical form tied for best");

  auto* eval_cmd = app.add_subcommand("evaluate", "Precision and recall on a corpus");
  eval_cmd->add_option("model", model_path)->required();
  eval_cmd->add_option("corpus", corpus_path)->required();
  eval_cmd->add_flag("--json", json, "Machine-readable report");
  eval_cmd->add_option("--reference", reference, "Print published results for comparison")
      ->check(CLI::IsMember({"geo880", "jobs640"}));

  auto* genlex_cmd = app.add_subcommand("genlex-dump", "List GENLEX candidates with provenance");
  genlex_cmd->add_option("corpus", corpus_path)->required();
  genlex_cmd->add_option("ontology", ontology_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  const ParserOptions opts = parser_options(g);
  try {
    if (*train_cmd) {
      Ontology ontology = Ontology::load(ontology_path);
      Lexicon seed = Lexicon::load(lexicon_path, ontology);
      Corpus corpus = load_corpus(corpus_path, ontology);
      LearnerConfig config;
      config.iterations = g.iterations;
      config.schedule.alpha0 = g.alpha0;
      config.schedule.c = g.c;
      config.schedule.passes = g.sgd_passes;
      config.parser = opts;
      config.genlex_max_len = g.max_phrase_len;
      TrainedModel trained = train(corpus.examples, seed, ontology, config);
      save_model(trained.model, model_path);
      if (!report_path.empty()) write_text(report_path, trained.report.json());
      std::cout << trained.report.table();
      std::cout << "lexicon " << trained.model.lexicon.size() << " items, " << trained.model.params.size()
                << " weights -> " << model_path << "\n";
    } else if (*parse_cmd) {
      Model model = load_model(model_path);
      auto tokens = tokenize(sentence);
      if (tokens.empty()) {
        std::cerr << "error: empty sentence\n";
        return kUsageError;
      }
      Chart chart(tokens, model.lexicon, model.params, opts);
      if (ties) {
        for (const auto& f : best_logical_form_ties(chart)) std::cout << print_term(f.logical_form) << "\n";
      } else if (auto best = best_logical_form(chart)) {
        std::cout << print_term(best->logical_form) << "\n";
      }
      if (chart.root().empty()) {
        std::cout << "(no parse)\n";
        return 0;
      }
      if (derivation || json) {
        auto d = best_derivation(chart);
        if (derivation) std::cout << "\n" << render_derivation(*d, tokens);
        if (json) std::cout << derivation_json(*d, tokens) << "\n";
      }
    } else if (*eval_cmd) {
      Model model = load_model(model_path);
      Corpus corpus = load_corpus(corpus_path, model.ontology);
      EvalReport report = evaluate(model, corpus, opts);
      if (json) {
        std::cout << report.json();
      } else {
        std::cout << report.table();
        for (const auto& ref : kReferences)
          if (reference == ref.name)
            std::cout << "reference (" << ref.name << ", published): precision " << ref.precision << " recall "
                      << ref.recall << "\n";
      }
    } else if (*genlex_cmd) {
      Ontology ontology = Ontology::load(ontology_path);
      Corpus corpus = load_corpus(corpus_path, ontology);
      std::cout << "example\trule\ttrigger\titem\n";
      for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        const auto& ex = corpus.examples[i];
        CandidateSet set = genlex(ex.tokens, ex.logical_form, g.max_phrase_len);
        for (const auto& item : set.lexicon().items())
          for (const auto& p : set.provenance(item.key()))
            std::cout << i + 1 << '\t' << p.rule << '\t' << p.trigger << '\t' << item.key() << "\n";
      }
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
