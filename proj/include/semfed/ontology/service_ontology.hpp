#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/rdf/class_description.hpp"
#include "semfed/rdf/graph.hpp"

namespace semfed::ontology {

class InvalidServiceDescription : public Error {
 public:
  explicit InvalidServiceDescription(const std::string& message) : Error("InvalidServiceDescription", message) {}
};

// A SADI-style service contract: instances of `input` go in, the same
// instances decorated up to `output` come out.
struct ServiceDescription {
  std::string name;  // `allX` or `getYByZ`
  std::string iri;
  rdf::ClassDescription input = rdf::ClassDescription::thing();
  rdf::ClassDescription output = rdf::ClassDescription::thing();
  std::string description;

  bool is_all() const;
  // Output conjuncts not already required by the input.
  std::vector<rdf::ClassDescription> new_conjuncts() const;

  friend bool operator==(const ServiceDescription&, const ServiceDescription&) = default;
};

// Throws InvalidServiceDescription unless the naming and decoration
// invariants hold.
void check_service_shape(const ServiceDescription& d);

class ServiceOntology {
 public:
  ServiceOntology() = default;
  ServiceOntology(std::string version, std::vector<ServiceDescription> services);

  const std::string& version() const noexcept { return version_; }
  const std::map<std::string, ServiceDescription>& entries() const noexcept { return entries_; }
  const ServiceDescription* find(std::string_view name) const;

 private:
  std::string version_ = "unversioned";
  std::map<std::string, ServiceDescription> entries_;
};

// Service ontology documents declare `<svc> a serv:Service` with
// serv:inputClass / serv:outputClass pointing at owl:Class nodes whose
// owl:equivalentClass carries the description, and rdfs:comment for the
// human-readable text. The service name is the IRI's local name.
ServiceOntology load_service_ontology(std::string_view text, std::string version = "unversioned");

// Adds the encoding of one service to `g`.
void encode_service(rdf::Graph& g, const ServiceDescription& d);
ServiceDescription decode_service(const rdf::Graph& g, const rdf::Term& service_iri);

// Prefix map used when writing service documents.
rdf::PrefixMap service_prefixes();

// Throws DanglingReference / UnknownProperty when a description references
// entities absent from `ont`.
void validate(const ServiceDescription& d, const DomainOntology& ont);
void validate(const ServiceOntology& s, const DomainOntology& ont);

}  // namespace semfed::ontology
