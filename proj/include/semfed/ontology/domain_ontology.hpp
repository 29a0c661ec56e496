#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/rdf/classify.hpp"

namespace semfed::ontology {

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> path);
  const std::vector<std::string>& path() const noexcept { return path_; }

 private:
  std::vector<std::string> path_;
};

class DanglingReference : public Error {
 public:
  explicit DanglingReference(std::string iri)
      : Error("DanglingReference", "reference to undeclared entity: " + iri), iri_(std::move(iri)) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

// Axiom outside the supported ontology vocabulary.
class UnsupportedAxiom : public Error {
 public:
  explicit UnsupportedAxiom(const std::string& message) : Error("UnsupportedAxiom", message) {}
};

struct ClassDecl {
  std::string iri;
  std::string label;
  std::set<std::string> superclasses;  // direct
  friend bool operator==(const ClassDecl&, const ClassDecl&) = default;
};

struct ObjectPropertyDecl {
  std::string iri;
  std::string label;
  friend bool operator==(const ObjectPropertyDecl&, const ObjectPropertyDecl&) = default;
};

struct DataPropertyDecl {
  std::string iri;
  std::string label;
  std::string range;  // datatype IRI, empty when undeclared
  friend bool operator==(const DataPropertyDecl&, const DataPropertyDecl&) = default;
};

// A versioned domain ontology: class hierarchy, properties, typed individuals.
class DomainOntology : public rdf::OntologyView {
 public:
  DomainOntology() = default;
  // Validates the hierarchy; throws CycleError or DanglingReference.
  DomainOntology(std::string version, std::map<std::string, ClassDecl> classes,
                 std::map<std::string, ObjectPropertyDecl> object_properties,
                 std::map<std::string, DataPropertyDecl> data_properties,
                 std::map<std::string, std::string> individuals);

  const std::string& version() const noexcept { return version_; }
  const std::map<std::string, ClassDecl>& classes() const noexcept { return classes_; }
  const std::map<std::string, ObjectPropertyDecl>& object_properties() const noexcept { return object_properties_; }
  const std::map<std::string, DataPropertyDecl>& data_properties() const noexcept { return data_properties_; }
  // individual IRI -> class IRI
  const std::map<std::string, std::string>& individuals() const noexcept { return individuals_; }

  // owl:Thing counts as declared.
  bool has_class(std::string_view iri) const;
  bool has_property(std::string_view iri) const override;
  bool is_object_property(std::string_view iri) const;
  bool is_data_property(std::string_view iri) const;
  bool is_subclass_of(std::string_view sub, std::string_view super) const override;

  bool empty() const noexcept {
    return classes_.empty() && object_properties_.empty() && data_properties_.empty() && individuals_.empty();
  }

 private:
  std::string version_ = "unversioned";
  std::map<std::string, ClassDecl> classes_;
  std::map<std::string, ObjectPropertyDecl> object_properties_;
  std::map<std::string, DataPropertyDecl> data_properties_;
  std::map<std::string, std::string> individuals_;
  std::map<std::string, std::set<std::string>, std::less<>> ancestors_;  // reflexive-transitive
};

// Reads an ontology document in the Turtle subset: `a owl:Class`,
// `a owl:ObjectProperty`, `a owl:DatatypeProperty`, `rdfs:subClassOf`,
// `rdfs:range`, `rdfs:label`, `rdfs:comment` (ignored) and `a <Class>` for
// individuals. The version id comes from the caller.
DomainOntology load_ontology(std::string_view text, std::string version = "unversioned");

// Throws DanglingReference for undeclared classes and UnknownProperty for
// undeclared properties referenced by `d`.
void validate_description(const rdf::ClassDescription& d, const DomainOntology& ont);

}  // namespace semfed::ontology
