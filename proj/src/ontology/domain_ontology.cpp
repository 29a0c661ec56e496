#include "semfed/ontology/domain_ontology.hpp"

#include <algorithm>
#include <functional>

#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::ontology {

namespace {

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += " -> ";
    out += p;
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> path)
    : Error("CycleError", "subclass cycle: " + join_path(path)), path_(std::move(path)) {}

DomainOntology::DomainOntology(std::string version, std::map<std::string, ClassDecl> classes,
                               std::map<std::string, ObjectPropertyDecl> object_properties,
                               std::map<std::string, DataPropertyDecl> data_properties,
                               std::map<std::string, std::string> individuals)
    : version_(std::move(version)),
      classes_(std::move(classes)),
      object_properties_(std::move(object_properties)),
      data_properties_(std::move(data_properties)),
      individuals_(std::move(individuals)) {
  for (const auto& [iri, decl] : classes_) {
    for (const auto& super : decl.superclasses) {
      if (!has_class(super)) throw DanglingReference(super);
    }
  }
  for (const auto& [iri, cls] : individuals_) {
    if (!has_class(cls)) throw DanglingReference(cls);
  }
  for (const auto& [iri, decl] : data_properties_) {
    if (!decl.range.empty() && !vocab::is_supported_datatype(decl.range)) throw DanglingReference(decl.range);
  }

  // Depth-first walk with an explicit path so a cycle can be reported.
  enum class Mark { Unvisited, Active, Done };
  std::map<std::string, Mark> marks;
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& iri) {
    auto& mark = marks[iri];
    if (mark == Mark::Done) return;
    if (mark == Mark::Active) {
      auto start = std::find(path.begin(), path.end(), iri);
      std::vector<std::string> cycle(start, path.end());
      cycle.push_back(iri);
      throw CycleError(std::move(cycle));
    }
    mark = Mark::Active;
    path.push_back(iri);
    std::set<std::string> ancestors{iri, std::string(vocab::kOwlThing)};
    if (auto it = classes_.find(iri); it != classes_.end()) {
      for (const auto& super : it->second.superclasses) {
        visit(super);
        const auto& inherited = ancestors_.at(super);
        ancestors.insert(inherited.begin(), inherited.end());
      }
    }
    path.pop_back();
    marks[iri] = Mark::Done;
    ancestors_.emplace(iri, std::move(ancestors));
  };
  for (const auto& [iri, decl] : classes_) visit(iri);
}

bool DomainOntology::has_class(std::string_view iri) const {
  return iri == vocab::kOwlThing || classes_.count(std::string(iri)) > 0;
}

bool DomainOntology::has_property(std::string_view iri) const {
  return is_object_property(iri) || is_data_property(iri);
}

bool DomainOntology::is_object_property(std::string_view iri) const {
  return object_properties_.count(std::string(iri)) > 0;
}

bool DomainOntology::is_data_property(std::string_view iri) const {
  return data_properties_.count(std::string(iri)) > 0;
}

bool DomainOntology::is_subclass_of(std::string_view sub, std::string_view super) const {
  if (sub == super || super == vocab::kOwlThing) return true;
  auto it = ancestors_.find(sub);
  return it != ancestors_.end() && it->second.count(std::string(super)) > 0;
}

DomainOntology load_ontology(std::string_view text, std::string version) {
  using rdf::Term;
  rdf::Graph g = rdf::parse_turtle(text);

  std::map<std::string, ClassDecl> classes;
  std::map<std::string, ObjectPropertyDecl> object_properties;
  std::map<std::string, DataPropertyDecl> data_properties;

  // First pass: declarations.
  for (const auto& t : g) {
    if (t.predicate.value() != vocab::kRdfType || !t.object.is_iri()) continue;
    if (!t.subject.is_iri()) throw UnsupportedAxiom("anonymous declaration " + t.subject.key());
    const std::string& s = t.subject.value();
    if (t.object.value() == vocab::kOwlClass) {
      classes[s].iri = s;
    } else if (t.object.value() == vocab::kOwlObjectProperty) {
      object_properties[s].iri = s;
    } else if (t.object.value() == vocab::kOwlDatatypeProperty) {
      data_properties[s].iri = s;
    }
  }

  std::map<std::string, std::string> individuals;
  for (const auto& t : g) {
    const std::string& p = t.predicate.value();
    const std::string& s = t.subject.value();
    if (p == vocab::kRdfType) {
      const std::string& o = t.object.value();
      if (o == vocab::kOwlClass || o == vocab::kOwlObjectProperty || o == vocab::kOwlDatatypeProperty) continue;
      if (!t.object.is_iri()) throw UnsupportedAxiom("rdf:type object must be an IRI");
      if (individuals.count(s) > 0) throw UnsupportedAxiom("individual with several types: " + s);
      individuals[s] = o;
    } else if (p == vocab::kRdfsLabel) {
      if (!t.object.is_literal()) throw UnsupportedAxiom("rdfs:label must be a literal");
      if (auto it = classes.find(s); it != classes.end()) {
        it->second.label = t.object.value();
      } else if (auto op = object_properties.find(s); op != object_properties.end()) {
        op->second.label = t.object.value();
      } else if (auto dp = data_properties.find(s); dp != data_properties.end()) {
        dp->second.label = t.object.value();
      } else {
        throw DanglingReference(s);
      }
    } else if (p == vocab::kRdfsSubClassOf) {
      auto it = classes.find(s);
      if (it == classes.end()) throw DanglingReference(s);
      if (!t.object.is_iri()) throw UnsupportedAxiom("rdfs:subClassOf needs a named superclass");
      it->second.superclasses.insert(t.object.value());
    } else if (p == vocab::kRdfsRange) {
      auto it = data_properties.find(s);
      if (it == data_properties.end()) {
        if (object_properties.count(s) > 0) continue;  // object ranges carry no information here
        throw DanglingReference(s);
      }
      it->second.range = t.object.value();
    } else if (p == vocab::kRdfsComment) {
      continue;
    } else {
      throw UnsupportedAxiom("unsupported predicate in ontology: " + p);
    }
  }
  return DomainOntology(std::move(version), std::move(classes), std::move(object_properties),
                        std::move(data_properties), std::move(individuals));
}

void validate_description(const rdf::ClassDescription& d, const DomainOntology& ont) {
  for (const auto& cls : d.named_classes()) {
    if (!ont.has_class(cls)) throw DanglingReference(cls);
  }
  rdf::check_properties(d, ont);
}

}  // namespace semfed::ontology
