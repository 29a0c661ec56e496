#include "semfed/rdf/graph.hpp"

#include <stdexcept>

namespace semfed::rdf {

Triple::Triple(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.is_literal()) throw std::invalid_argument("literal in subject position");
  if (!predicate.is_iri()) throw std::invalid_argument("predicate must be an IRI");
}

bool CanonicalTripleLess::operator()(const Triple& a, const Triple& b) const noexcept {
  if (auto c = a.predicate.key().compare(b.predicate.key()); c != 0) return c < 0;
  if (auto c = a.subject.key().compare(b.subject.key()); c != 0) return c < 0;
  return a.object.key() < b.object.key();
}

bool CanonicalTripleLess::operator()(const Triple& a, const Probe& b) const noexcept {
  if (auto c = a.predicate.key().compare(b.predicate->key()); c != 0) return c < 0;
  if (b.subject == nullptr) return false;
  return a.subject.key() < b.subject->key();
}

bool CanonicalTripleLess::operator()(const Probe& a, const Triple& b) const noexcept {
  if (auto c = a.predicate->key().compare(b.predicate.key()); c != 0) return c < 0;
  if (a.subject == nullptr) return false;
  return a.subject->key() < b.subject.key();
}

bool Graph::insert(Triple t) { return triples_.insert(std::move(t)).second; }

void Graph::merge(const Graph& other) {
  for (const auto& [prefix, iri] : other.prefixes_) prefixes_.emplace(prefix, iri);
  triples_.insert(other.triples_.begin(), other.triples_.end());
}

std::vector<Term> Graph::objects(const Term& subject, const Term& predicate) const {
  std::vector<Term> out;
  auto [lo, hi] = triples_.equal_range(CanonicalTripleLess::Probe{&predicate, &subject});
  for (auto it = lo; it != hi; ++it) out.push_back(it->object);
  return out;
}

std::vector<Term> Graph::subjects() const {
  std::set<Term> seen;
  for (const auto& t : triples_) seen.insert(t.subject);
  return {seen.begin(), seen.end()};
}

std::vector<Triple> Graph::with_predicate(const Term& predicate) const {
  auto [lo, hi] = triples_.equal_range(CanonicalTripleLess::Probe{&predicate, nullptr});
  return {lo, hi};
}

}  // namespace semfed::rdf
