#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "ccglearn/semantics.hpp"

namespace ccglearn {

/// Weights indexed by lexical item key. Unknown keys weigh 0.
class ParamVector {
 public:
  double weight(const std::string& key) const {
    auto it = weights_.find(key);
    return it == weights_.end() ? 0.0 : it->second;
  }
  void set(const std::string& key, double value);
  void add(const std::string& key, double delta) { set(key, weight(key) + delta); }
  bool contains(const std::string& key) const { return weights_.count(key) != 0; }
  std::size_t size() const { return weights_.size(); }
  const std::map<std::string, double>& weights() const { return weights_; }

  /// `<lexical item line> TAB <weight>` per entry, sorted by key. Weights are
  /// written in shortest round-trip form.
  void write(std::ostream& out) const;
  /// Entries are re-keyed through the lexical item parser, so the ontology is
  /// needed to type the semantics.
  static ParamVector read(std::istream& in, const Ontology& ontology);

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::map<std::string, double> weights_;
};

std::string format_weight(double w);
double parse_weight(const std::string& text);

}  // namespace ccglearn
