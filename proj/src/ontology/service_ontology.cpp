#include "semfed/ontology/service_ontology.hpp"

#include <algorithm>
#include <regex>

#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::ontology {

using rdf::ClassDescription;
using rdf::Term;

bool ServiceDescription::is_all() const { return name.rfind("all", 0) == 0; }

std::vector<ClassDescription> ServiceDescription::new_conjuncts() const {
  auto required = input.conjuncts();
  std::vector<ClassDescription> out;
  for (auto& c : output.conjuncts()) {
    if (c.is_thing()) continue;
    if (std::find(required.begin(), required.end(), c) == required.end()) out.push_back(std::move(c));
  }
  return out;
}

void check_service_shape(const ServiceDescription& d) {
  static const std::regex all_re("^all[A-Z][A-Za-z0-9_]*$");
  static const std::regex get_re("^get[A-Z][A-Za-z0-9_]*By[A-Z][A-Za-z0-9_]*$");
  if (std::regex_match(d.name, all_re)) {
    if (!d.input.is_thing()) throw InvalidServiceDescription(d.name + ": allX services take owl:Thing as input");
    for (const auto& c : d.output.conjuncts()) {
      if (c.kind() != ClassDescription::Kind::Named || c.is_thing()) {
        throw InvalidServiceDescription(d.name + ": allX output must be named classes");
      }
    }
    return;
  }
  if (!std::regex_match(d.name, get_re)) {
    throw InvalidServiceDescription("service name must follow allX or getYByZ: " + d.name);
  }
  auto required = d.input.conjuncts();
  auto provided = d.output.conjuncts();
  for (const auto& r : required) {
    if (r.is_thing()) continue;
    if (std::find(provided.begin(), provided.end(), r) == provided.end()) {
      throw InvalidServiceDescription(d.name + ": output must include the input constraint " + r.canonical());
    }
  }
  auto added = d.new_conjuncts();
  if (std::none_of(added.begin(), added.end(), [](const ClassDescription& c) { return c.is_restriction(); })) {
    throw InvalidServiceDescription(d.name + ": output adds no restriction to the input");
  }
}

ServiceOntology::ServiceOntology(std::string version, std::vector<ServiceDescription> services)
    : version_(std::move(version)) {
  for (auto& s : services) {
    check_service_shape(s);
    std::string name = s.name;
    if (!entries_.emplace(name, std::move(s)).second) {
      throw InvalidServiceDescription("duplicate service name: " + name);
    }
  }
}

const ServiceDescription* ServiceOntology::find(std::string_view name) const {
  auto it = entries_.find(std::string(name));
  return it == entries_.end() ? nullptr : &it->second;
}

rdf::PrefixMap service_prefixes() {
  return {
      {"owl", std::string(vocab::kOwl)},
      {"rdf", std::string(vocab::kRdf)},
      {"rdfs", std::string(vocab::kRdfs)},
      {"serv", std::string(vocab::kServ)},
      {"xsd", std::string(vocab::kXsd)},
  };
}

void encode_service(rdf::Graph& g, const ServiceDescription& d) {
  Term service = Term::iri(d.iri);
  Term input = Term::iri(d.iri + "_Input");
  Term output = Term::iri(d.iri + "_Output");
  g.insert(service, Term::iri(std::string(vocab::kRdfType)), Term::iri(std::string(vocab::kServService)));
  if (!d.description.empty()) {
    g.insert(service, Term::iri(std::string(vocab::kRdfsComment)), Term::string_literal(d.description));
  }
  g.insert(service, Term::iri(std::string(vocab::kServInputClass)), input);
  g.insert(service, Term::iri(std::string(vocab::kServOutputClass)), output);
  rdf::encode_class_definition(g, input, d.input, d.name + "_in");
  rdf::encode_class_definition(g, output, d.output, d.name + "_out");
}

namespace {

Term single(const std::vector<Term>& terms, const std::string& what, const std::string& service) {
  if (terms.size() != 1) throw InvalidServiceDescription(service + ": expected exactly one " + what);
  return terms.front();
}

}  // namespace

ServiceDescription decode_service(const rdf::Graph& g, const Term& service_iri) {
  ServiceDescription d;
  d.iri = service_iri.value();
  d.name = std::string(rdf::local_name(d.iri));
  Term input = single(g.objects(service_iri, Term::iri(std::string(vocab::kServInputClass))),
                             "serv:inputClass", d.name);
  Term output = single(g.objects(service_iri, Term::iri(std::string(vocab::kServOutputClass))),
                              "serv:outputClass", d.name);
  d.input = rdf::decode_class_definition(g, input);
  d.output = rdf::decode_class_definition(g, output);
  auto comments = g.objects(service_iri, Term::iri(std::string(vocab::kRdfsComment)));
  if (!comments.empty()) d.description = comments.front().value();
  return d;
}

ServiceOntology load_service_ontology(std::string_view text, std::string version) {
  rdf::Graph g = rdf::parse_turtle(text);
  std::vector<ServiceDescription> services;
  Term rdf_type = Term::iri(std::string(vocab::kRdfType));
  Term service_class = Term::iri(std::string(vocab::kServService));
  for (const auto& t : g.with_predicate(rdf_type)) {
    if (t.object != service_class) continue;
    if (!t.subject.is_iri()) throw InvalidServiceDescription("services must be named by an IRI");
    services.push_back(decode_service(g, t.subject));
  }
  return ServiceOntology(std::move(version), std::move(services));
}

void validate(const ServiceDescription& d, const DomainOntology& ont) {
  validate_description(d.input, ont);
  validate_description(d.output, ont);
}

void validate(const ServiceOntology& s, const DomainOntology& ont) {
  for (const auto& [name, d] : s.entries()) validate(d, ont);
}

}  // namespace semfed::ontology
