#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semfed/rdf/term.hpp"

namespace semfed::rdf {

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  // Throws std::invalid_argument if the subject is a literal or the predicate
  // is not an IRI.
  Triple(Term s, Term p, Term o);

  friend bool operator==(const Triple&, const Triple&) = default;
};

// Canonical order: predicate, then subject, then object, each compared on its
// serialized key. Transparent so (predicate, subject) ranges can be probed.
struct CanonicalTripleLess {
  using is_transparent = void;

  struct Probe {
    const Term* predicate;
    const Term* subject;  // nullptr probes the whole predicate range
  };

  bool operator()(const Triple& a, const Triple& b) const noexcept;
  bool operator()(const Triple& a, const Probe& b) const noexcept;
  bool operator()(const Probe& a, const Triple& b) const noexcept;
};

using PrefixMap = std::map<std::string, std::string>;

// A set of triples plus the prefix declarations it was read with.
class Graph {
 public:
  using TripleSet = std::set<Triple, CanonicalTripleLess>;
  using const_iterator = TripleSet::const_iterator;

  Graph() = default;
  explicit Graph(PrefixMap prefixes) : prefixes_(std::move(prefixes)) {}

  // Returns false when the triple was already present.
  bool insert(Triple t);
  bool insert(Term s, Term p, Term o) { return insert(Triple(std::move(s), std::move(p), std::move(o))); }
  bool erase(const Triple& t) { return triples_.erase(t) > 0; }
  void merge(const Graph& other);

  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  const_iterator begin() const noexcept { return triples_.begin(); }
  const_iterator end() const noexcept { return triples_.end(); }

  // Triples matching (subject, predicate, *), as an iterator range.
  std::pair<const_iterator, const_iterator> match(const Term& subject, const Term& predicate) const {
    return triples_.equal_range(CanonicalTripleLess::Probe{&predicate, &subject});
  }
  // Objects of (subject, predicate, *) in canonical order.
  std::vector<Term> objects(const Term& subject, const Term& predicate) const;
  // Distinct subjects in canonical order.
  std::vector<Term> subjects() const;
  // All triples with the given predicate.
  std::vector<Triple> with_predicate(const Term& predicate) const;

  const PrefixMap& prefixes() const noexcept { return prefixes_; }
  void set_prefix(std::string prefix, std::string iri) { prefixes_[std::move(prefix)] = std::move(iri); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.prefixes_ == b.prefixes_ && a.triples_ == b.triples_;
  }

 private:
  PrefixMap prefixes_;
  TripleSet triples_;
};

}  // namespace semfed::rdf
