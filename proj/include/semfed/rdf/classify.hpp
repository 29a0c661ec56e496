#pragma once

#include <string>
#include <string_view>

#include "semfed/error.hpp"
#include "semfed/rdf/class_description.hpp"
#include "semfed/rdf/graph.hpp"

namespace semfed::rdf {

class UnknownProperty : public Error {
 public:
  explicit UnknownProperty(std::string iri)
      : Error("UnknownProperty", "property not declared in the domain ontology: " + iri), iri_(std::move(iri)) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

// What classification needs to know about an ontology.
class OntologyView {
 public:
  virtual ~OntologyView() = default;
  virtual bool has_property(std::string_view iri) const = 0;
  // Reflexive-transitive subclass test.
  virtual bool is_subclass_of(std::string_view sub, std::string_view super) const = 0;
};

// Closed-world structural check of `node` against `d`: only explicit
// rdf:type triples plus the declared subclass hierarchy count.
// Throws UnknownProperty when `d` references an undeclared property.
bool classify(const Graph& g, const Term& node, const ClassDescription& d, const OntologyView& ont);

// Throws UnknownProperty for the first undeclared property in `d`.
void check_properties(const ClassDescription& d, const OntologyView& ont);

}  // namespace semfed::rdf
