#include "support/classification_corpus.hpp"

#include <algorithm>
#include <bit>

#include "semfed/rdf/vocab.hpp"
#include "support/classify_oracle.hpp"

namespace semfed::testing {

namespace {

const std::string kNs = "http://corpus.test/";

rdf::Term iri(const std::string& local) { return rdf::Term::iri(kNs + local); }

}  // namespace

ClassificationUniverse::ClassificationUniverse() {
  using CD = rdf::ClassDescription;
  nodes = {iri("a"), iri("b"), iri("c")};
  rdf::Term type = rdf::Term::iri(std::string(vocab::kRdfType));
  for (const auto& n : nodes) {
    triples.emplace_back(n, type, iri("A"));
    triples.emplace_back(n, type, iri("B"));
  }
  for (const auto& s : nodes) {
    for (const auto& o : nodes) triples.emplace_back(s, iri("p"), o);
  }
  for (const auto& s : nodes) triples.emplace_back(s, iri("d"), rdf::Term::string_literal("v"));

  superclasses = {{kNs + "A", {kNs + "A"}}, {kNs + "B", {kNs + "A", kNs + "B"}}};

  auto A = CD::named(kNs + "A");
  auto B = CD::named(kNs + "B");
  auto p = kNs + "p";
  auto d = kNs + "d";
  auto some = [](const std::string& prop, CD filler) { return CD::object_some_values_from(prop, std::move(filler)); };
  auto v = rdf::Term::string_literal("v");
  descriptions = {
      CD::thing(),
      A,
      B,
      CD::intersection_of({A, B}),
      some(p, CD::thing()),
      some(p, A),
      some(p, B),
      some(p, some(p, CD::thing())),
      some(p, some(p, B)),
      CD::object_has_value(p, iri("a")),
      CD::object_has_value(p, iri("c")),
      CD::data_some_values_from(d, std::string(vocab::kXsdString)),
      CD::data_some_values_from(d, std::string(vocab::kXsdInteger)),
      CD::data_has_value(d, v),
      CD::intersection_of({A, some(p, B)}),
      CD::intersection_of({B, CD::data_some_values_from(d, std::string(vocab::kXsdString))}),
      some(p, CD::intersection_of({A, CD::data_has_value(d, v)})),
      CD::intersection_of({CD::object_has_value(p, iri("b")), some(p, A)}),
      some(p, some(p, some(p, A))),
      CD::intersection_of({A, B, some(p, CD::object_has_value(p, iri("a")))}),
      CD::data_some_values_from(p, std::string(vocab::kXsdString)),
  };
}

bool UniverseOntology::has_property(std::string_view iri) const {
  static const std::string p = kNs + "p", d = kNs + "d";
  return iri == p || iri == d;
}

bool UniverseOntology::is_subclass_of(std::string_view sub, std::string_view super) const {
  static const std::string a = kNs + "A", b = kNs + "B";
  if (super == vocab::kOwlThing || sub == super) return true;
  return sub == b && super == a;
}

CorpusResult run_classification_corpus(std::size_t max_triples) {
  ClassificationUniverse u;
  UniverseOntology ont;
  ClassifyOracle oracle(u.superclasses);
  CorpusResult result;

  const std::size_t n = u.triples.size();
  rdf::Graph g;
  std::vector<rdf::Triple> flat;
  std::uint64_t previous = 0;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
    std::uint64_t code = i ^ (i >> 1);
    if (i > 0) {
      int bit = std::countr_zero(code ^ previous);
      const rdf::Triple& t = u.triples[bit];
      if (code & (std::uint64_t{1} << bit)) {
        g.insert(t);
        flat.push_back(t);
      } else {
        g.erase(t);
        auto it = std::find(flat.begin(), flat.end(), t);
        *it = std::move(flat.back());
        flat.pop_back();
      }
    }
    previous = code;
    if (static_cast<std::size_t>(std::popcount(code)) > max_triples) continue;

    ++result.graphs;
    for (const auto& node : u.nodes) {
      for (const auto& d : u.descriptions) {
        ++result.checks;
        bool got = rdf::classify(g, node, d, ont);
        bool want = oracle.holds(flat, node, d);
        if (got != want) {
          if (result.mismatches == 0) {
            result.first_mismatch = "graph mask " + std::to_string(code) + ", node " + node.value() + ", " +
                                    d.canonical() + ": classify=" + (got ? "true" : "false");
          }
          ++result.mismatches;
        }
      }
    }
  }
  return result;
}

}  // namespace semfed::testing
