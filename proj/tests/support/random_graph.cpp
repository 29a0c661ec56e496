#include "support/random_graph.hpp"

#include <string>
#include <vector>

#include "semfed/rdf/vocab.hpp"

namespace semfed::testing {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

const std::vector<std::pair<std::string, std::string>> kPrefixes = {
    {"ex", "http://ex.org/"},
    {"exh", "http://ex.org/ns#"},
    {"", "http://default.example/"},
    {"xsd", "http://www.w3.org/2001/XMLSchema#"},
};

const std::vector<std::string> kIris = {
    "http://ex.org/a",         "http://ex.org/a.b",        "http://ex.org/trailing.",
    "http://ex.org/with-dash", "http://ex.org/ns#frag",    "http://ex.org/ns#_under",
    "http://ex.org/",          "http://default.example/x", "http://other.org/p?q=1",
    "urn:isbn:123",            "http://ex.org/9lead",      "http://ex.org/a/b",
};

const std::vector<std::string> kStrings = {
    "", "Permethrin", "contact & airborne", "say \"hi\"", "back\\slash", "tab\there", "line\nbreak",
    "cr\rhere", "ünïcødé", "# not a comment", "ends with .", "@prefix", "a ; b , c",
};

rdf::Term random_iri(std::mt19937_64& rng) { return rdf::Term::iri(kIris[pick(rng, kIris.size())]); }

rdf::Term random_blank(std::mt19937_64& rng) {
  static const std::vector<std::string> labels = {"b0", "b1", "node-x", "n_2", "b10"};
  return rdf::Term::blank(labels[pick(rng, labels.size())]);
}

rdf::Term random_literal(std::mt19937_64& rng) {
  switch (pick(rng, 3)) {
    case 0:
      return rdf::Term::string_literal(kStrings[pick(rng, kStrings.size())]);
    case 1: {
      static const std::vector<std::string> ints = {"0", "42", "-7", "+3", "007"};
      return rdf::Term::literal(ints[pick(rng, ints.size())], vocab::kXsdInteger);
    }
    default: {
      static const std::vector<std::string> years = {"2015", "2016", "-0044", "12345"};
      return rdf::Term::literal(years[pick(rng, years.size())], vocab::kXsdGYear);
    }
  }
}

}  // namespace

rdf::Graph random_graph(std::mt19937_64& rng, std::size_t max_triples) {
  rdf::PrefixMap prefixes;
  for (const auto& [p, ns] : kPrefixes) {
    if (pick(rng, 2) == 0) prefixes[p] = ns;
  }
  rdf::Graph g(prefixes);
  std::size_t n = pick(rng, max_triples + 1);
  for (std::size_t i = 0; i < n; ++i) {
    rdf::Term s = pick(rng, 3) == 0 ? random_blank(rng) : random_iri(rng);
    rdf::Term p = pick(rng, 4) == 0 ? rdf::Term::iri(std::string(vocab::kRdfType)) : random_iri(rng);
    rdf::Term o = [&] {
      switch (pick(rng, 3)) {
        case 0: return random_iri(rng);
        case 1: return random_blank(rng);
        default: return random_literal(rng);
      }
    }();
    g.insert(std::move(s), std::move(p), std::move(o));
  }
  return g;
}

}  // namespace semfed::testing
