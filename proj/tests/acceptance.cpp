// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "ccglearn/evaluate.hpp"
#include "ccglearn/learner.hpp"
#include "json.hpp"
#include "support/oracle.hpp"

using namespace ccglearn;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s  %-22s %s (%.3fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const Ontology& geo() {
  static const Ontology o = Ontology::load(CCGLEARN_TEST_DATA "/geo.ontology");
  return o;
}

const ParserOptions kExact{kUnboundedBeam};

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); }

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome fig2a() {
  const auto t0 = std::chrono::steady_clock::now();
  Lexicon lex = Lexicon::load(CCGLEARN_TEST_DATA "/fig2a.lexicon", geo());
  ParamVector theta;
  auto tokens = tokenize("utah borders idaho");
  Chart chart(tokens, lex, theta);
  auto dist = logical_form_distribution(chart);
  auto d = best_derivation(chart);
  const double secs = seconds_since(t0);
  if (dist.size() != 1) return {false, std::to_string(dist.size()) + " logical forms"};
  if (print_term(dist[0].logical_form) != "borders(utah, idaho)") return {false, print_term(dist[0].logical_form)};
  const double p = std::exp(dist[0].log_prob);
  if (std::abs(p - 1.0) > 1e-12) return {false, fmt("P = %.17g", p)};
  if (!d || render_derivation(*d, tokens) != read_file(CCGLEARN_TEST_DATA "/fig2a.derivation"))
    return {false, "derivation differs from golden tree"};
  return {secs < 0.1, fmt("P = %.15f, golden tree matches, %.4fs", p, secs)};
}

Outcome fig2b() {
  const auto t0 = std::chrono::steady_clock::now();
  Lexicon lex = Lexicon::load(CCGLEARN_TEST_DATA "/fig2b.lexicon", geo());
  ParamVector theta;
  Chart chart(tokenize("what states border texas"), lex, theta);
  auto best = best_logical_form(chart);
  const double secs = seconds_since(t0);
  if (!best) return {false, "no parse"};
  const bool ok = equivalent(best->logical_form, parse_term("lambda x:e . and(state(x), borders(x, texas))", geo()));
  return {ok && secs < 0.1, print_term(best->logical_form) + fmt(", %.4fs", secs)};
}

Outcome fig3() {
  auto cats = categories(parse_term("argmax(lambda x:e . and(state(x), borders(x, texas)), lambda x:e . size(x))", geo()));
  const char* want[][2] = {
      {"NP", "texas"},
      {"N", "lambda x:e . state(x)"},
      {"S\\NP", "lambda x:e . state(x)"},
      {"(S\\NP)/NP", "lambda x:e . lambda y:e . borders(y, x)"},
      {"(S\\NP)/NP", "lambda x:e . lambda y:e . borders(x, y)"},
      {"N/N", "lambda g:<e,t> . lambda x:e . and(state(x), g(x))"},
      {"N/N", "lambda g:<e,t> . lambda x:e . and(borders(x, texas), g(x))"},
      {"NP/N", "lambda g:<e,t> . argmax(g, lambda x:e . size(x))"},
      {"S/NP", "lambda x:e . size(x)"},
  };
  std::size_t found = 0;
  std::string missing;
  for (const auto& w : want) {
    SynCat syn = parse_syncat(w[0]);
    Term sem = parse_term(w[1], geo());
    bool hit = false;
    for (const auto& g : cats) hit = hit || (g.consistent && g.cat.syn == syn && equivalent(g.cat.sem, sem));
    if (hit)
      ++found;
    else
      missing += std::string(" ") + w[0];
  }
  return {found == 9, std::to_string(found) + "/9 categories found" + missing};
}

Outcome normalization() {
  double worst = 0;
  for (unsigned seed = 0; seed < 10; ++seed) {
    auto inst = oracle::random_instance(1000 + seed, 5);
    Chart chart(inst.tokens, inst.lexicon, inst.params, kExact);
    oracle::Enumerator e(inst.tokens, inst.lexicon, inst.params, kExact);
    const double z = *chart.log_partition();
    double total = 0;
    for (const auto& d : e.root()) total += std::exp(d.score - z);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst <= 1e-9, fmt("max |sum P - 1| = %.3g over 10 grammars", worst)};
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const double h = 1e-5;
  double worst = 0;
  std::size_t coords = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    auto inst = oracle::random_instance(2000 + seed, 5);
    Chart chart(inst.tokens, inst.lexicon, inst.params, kExact);
    const Term target = logical_form_distribution(chart).back().logical_form;
    const Expectation g = gradient(chart, target);
    for (const auto& item : inst.lexicon.items()) {
      auto at = [&](double delta) {
        ParamVector p = inst.params;
        p.add(item.key(), delta);
        Chart c(inst.tokens, inst.lexicon, p, kExact);
        return log_prob_form(c, target);
      };
      const double fd = (at(h) - at(-h)) / (2 * h);
      const double an = g.count(item.key()) ? g.at(item.key()) : 0.0;
      const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, std::abs(an - fd) / scale);
      ++coords;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10, fmt("max relative error %.3g", worst) + " over " + std::to_string(coords) +
                                         " coordinates" + fmt(", %.2fs", secs)};
}

double max_diff(const Expectation& a, const Expectation& b) {
  double worst = 0;
  auto get = [](const Expectation& e, const std::string& k) { return e.count(k) ? e.at(k) : 0.0; };
  for (const auto& [k, v] : a) worst = std::max(worst, std::abs(v - get(b, k)));
  for (const auto& [k, v] : b) worst = std::max(worst, std::abs(v - get(a, k)));
  return worst;
}

Outcome inside_outside() {
  double worst = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    auto inst = oracle::random_instance(2000 + seed, 5);
    Chart chart(inst.tokens, inst.lexicon, inst.params, kExact);
    oracle::Enumerator e(inst.tokens, inst.lexicon, inst.params, kExact);
    const auto all = e.root();
    worst = std::max(worst, max_diff(expected_features_free(chart), oracle::expected(all)));
    std::map<std::string, std::vector<oracle::Deriv>> groups;
    for (const auto& d : all) groups[d.sem_key].push_back(d);
    for (const auto& [key, ds] : groups)
      worst = std::max(worst, max_diff(expected_features_clamped(chart, ds.front().cat.sem), oracle::expected(ds)));
  }
  return {worst <= 1e-9, fmt("max |E_chart - E_enum| = %.3g over 20 instances", worst)};
}

Outcome pruning() {
  auto corpus = load_corpus(CCGLEARN_TEST_DATA "/geo_train.corpus", geo());
  Lexicon seed = Lexicon::load(CCGLEARN_TEST_DATA "/geo_seed.lexicon", geo());
  const std::vector<TrainingExample> data(corpus.examples.begin(), corpus.examples.begin() + 10);
  LearnerConfig cfg;
  cfg.parser.beam = kUnboundedBeam;
  Lexicon star = seed;
  for (const auto& ex : data) {
    CandidateSet c = genlex(ex.tokens, ex.logical_form, cfg.genlex_max_len);
    star.add_all(c.lexicon());
  }
  // Uneven weights so the comparison is not between ties of a flat model.
  ParamVector p = init_params(seed, data, cfg);
  const ParamVector init = p;
  std::size_t n = 0;
  for (const auto& [key, w] : init.weights()) p.set(key, w + 0.001 * static_cast<double>(n++ % 7));

  Step1Result r = step1_lexical_generation(data, seed, p, cfg);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Chart full(data[i].tokens, star, p, cfg.parser);
    Chart pruned(data[i].tokens, r.lexicon, p, cfg.parser);
    auto a = constrained_best(full, data[i].logical_form);
    auto b = constrained_best(pruned, data[i].logical_form);
    if (a && b && std::abs(a->score - b->score) <= 1e-12 * std::max(1.0, std::abs(a->score))) ++agree;
  }
  return {agree == data.size(), std::to_string(agree) + "/10 examples keep their best constrained score"};
}

struct Toy {
  fs::path dir;
  double train_secs = 0;
  bool trained = false;
};

Toy& toy() {
  static Toy t = [] {
    Toy out;
    out.dir = fs::temp_directory_path() / ("ccglearn_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(out.dir);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = std::string("'") + CCGLEARN_CLI + "' train " + CCGLEARN_TEST_DATA "/geo_train.corpus " +
                            CCGLEARN_TEST_DATA "/geo.ontology " + CCGLEARN_TEST_DATA "/geo_seed.lexicon -o ";
    out.trained = run(cmd + q(out.dir / "model1") + " --report " + q(out.dir / "report1.json")) == 0 &&
                  run(cmd + q(out.dir / "model2") + " --report " + q(out.dir / "report2.json")) == 0;
    out.train_secs = seconds_since(t0) / 2;
    return out;
  }();
  return t;
}

Outcome toy_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  Toy& t = toy();
  if (!t.trained) return {false, "train command failed"};
  Model model = load_model((t.dir / "model1").string());
  auto train = load_corpus(CCGLEARN_TEST_DATA "/geo_train.corpus", geo());
  auto test = load_corpus(CCGLEARN_TEST_DATA "/geo_test.corpus", geo());
  auto rep = nlohmann::json::parse(read_file((t.dir / "report1.json").string()));

  const auto& last = rep["iterations"].back();
  std::set<std::size_t> failed;
  for (const auto& f : last["failures"]) failed.insert(f.get<std::size_t>());
  Corpus parseable;
  for (std::size_t i = 0; i < train.examples.size(); ++i)
    if (!failed.count(i)) parseable.examples.push_back(train.examples[i]);

  double worst_ratio = 0;
  for (const auto& it : rep["iterations"])
    for (const auto& ex : it["examples"])
      if (ex["parsed"].get<bool>())
        worst_ratio = std::max(worst_ratio, ex["selected"].get<double>() / ex["genlex"].get<double>());

  const EvalReport tr = evaluate(model, parseable);
  const EvalReport te = evaluate(model, test);
  const double secs = t.train_secs + seconds_since(t0);
  const bool ok = !parseable.examples.empty() && tr.recall == 1.0 && !te.no_parses && te.precision >= 0.8 &&
                  worst_ratio < 0.1 && secs < 60;
  std::ostringstream d;
  d << "train recall " << tr.correct << "/" << tr.total << " (" << failed.size() << " step-1 failures), test P "
    << fmt("%.3f R %.3f", te.precision, te.recall) << ", max |lambda_i|/|GENLEX| " << fmt("%.4f", worst_ratio)
    << fmt(", %.2fs", secs);
  return {ok, d.str()};
}

Outcome determinism() {
  Toy& t = toy();
  if (!t.trained) return {false, "train command failed"};
  const bool model_same = read_file((t.dir / "model1").string()) == read_file((t.dir / "model2").string());
  const bool report_same = read_file((t.dir / "report1.json").string()) == read_file((t.dir / "report2.json").string());
  return {model_same && report_same, std::string("model ") + (model_same ? "identical" : "differs") + ", report " +
                                         (report_same ? "identical" : "differs")};
}

void geo880() {
  const char* dir = std::getenv("GEO880_DIR");
  if (!dir) {
    std::printf("SKIP  geo880 (conditional)    set GEO880_DIR to a directory with geo.ontology, seed.lexicon, "
                "train.corpus and test.corpus\n");
    return;
  }
  report("geo880 (conditional)", [&]() -> Outcome {
    const fs::path d(dir), out = toy().dir / "geo880.model";
    const std::string cli = std::string("'") + CCGLEARN_CLI + "'";
    if (run(cli + " train " + q(d / "train.corpus") + " " + q(d / "geo.ontology") + " " + q(d / "seed.lexicon") +
            " -o " + q(out)) != 0)
      return {false, "train failed"};
    // The table with the published reference numbers goes to stdout.
    if (std::system((cli + " evaluate " + q(out) + " " + q(d / "test.corpus") + " --reference geo880").c_str()) != 0)
      return {false, "evaluate failed"};
    return {true, "pipeline completed; reference P 96.25 / R 79.29 printed, not asserted"};
  });
}

}  // namespace

int main() {
  report("fig2a golden", fig2a);
  report("fig2b golden", fig2b);
  report("fig3 categories", fig3);
  report("normalization", normalization);
  report("gradient check", gradient_check);
  report("inside-outside", inside_outside);
  report("pruning no-harm", pruning);
  report("toy end-to-end", toy_end_to_end);
  report("determinism", determinism);
  geo880();
  std::error_code ec;
  fs::remove_all(toy().dir, ec);
  std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
