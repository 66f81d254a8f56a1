#include "ccglearn/params.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "ccglearn/errors.hpp"
#include "ccglearn/grammar.hpp"

namespace ccglearn {

void ParamVector::set(const std::string& key, double value) {
  if (!std::isfinite(value)) throw Error("non-finite weight for " + key);
  weights_[key] = value;
}

std::string format_weight(double w) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w);
  return std::string(buf, end);
}

double parse_weight(const std::string& text) {
  double w = 0;
  auto first = text.data();
  auto last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, w);
  if (ec != std::errc() || ptr != last) throw DataError("bad weight '" + text + "'");
  return w;
}

void ParamVector::write(std::ostream& out) const {
  for (const auto& [key, w] : weights_) out << key << '\t' << format_weight(w) << '\n';
}

ParamVector ParamVector::read(std::istream& in, const Ontology& ontology) {
  ParamVector params;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError("parameter line " + std::to_string(lineno) + ": missing weight");
    try {
      LexicalItem item = parse_lexical_item(std::string_view(line).substr(0, tab), ontology);
      params.set(item.key(), parse_weight(line.substr(tab + 1)));
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError("parameter line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return params;
}

}  // namespace ccglearn
