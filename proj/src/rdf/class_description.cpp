#include "semfed/rdf/class_description.hpp"

#include <algorithm>

#include "semfed/rdf/vocab.hpp"

namespace semfed::rdf {

ClassDescription ClassDescription::named(std::string class_iri) {
  if (!is_absolute_iri(class_iri)) throw InvalidClassDescription("class IRI is not absolute: " + class_iri);
  ClassDescription d;
  d.kind_ = Kind::Named;
  d.iri_ = std::move(class_iri);
  d.finish();
  return d;
}

ClassDescription ClassDescription::thing() { return named(std::string(vocab::kOwlThing)); }

ClassDescription ClassDescription::intersection_of(std::vector<ClassDescription> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) throw InvalidClassDescription("intersection needs at least two distinct members");
  ClassDescription d;
  d.kind_ = Kind::IntersectionOf;
  d.operands_ = std::move(members);
  d.finish();
  return d;
}

ClassDescription ClassDescription::object_some_values_from(std::string property, ClassDescription filler) {
  ClassDescription d;
  d.kind_ = Kind::ObjectSomeValuesFrom;
  d.iri_ = std::move(property);
  d.operands_.push_back(std::move(filler));
  d.finish();
  return d;
}

ClassDescription ClassDescription::object_has_value(std::string property, Term value) {
  if (value.is_literal()) throw InvalidClassDescription("object hasValue needs an IRI or blank node");
  ClassDescription d;
  d.kind_ = Kind::ObjectHasValue;
  d.iri_ = std::move(property);
  d.value_ = std::move(value);
  d.finish();
  return d;
}

ClassDescription ClassDescription::data_some_values_from(std::string property, std::string datatype) {
  if (!vocab::is_supported_datatype(datatype)) throw InvalidClassDescription("unsupported datatype: " + datatype);
  ClassDescription d;
  d.kind_ = Kind::DataSomeValuesFrom;
  d.iri_ = std::move(property);
  d.datatype_ = std::move(datatype);
  d.finish();
  return d;
}

ClassDescription ClassDescription::data_has_value(std::string property, Term literal) {
  if (!literal.is_literal()) throw InvalidClassDescription("data hasValue needs a literal");
  ClassDescription d;
  d.kind_ = Kind::DataHasValue;
  d.iri_ = std::move(property);
  d.value_ = std::move(literal);
  d.finish();
  return d;
}

void ClassDescription::finish() {
  if (kind_ != Kind::Named && kind_ != Kind::IntersectionOf && !is_absolute_iri(iri_)) {
    throw InvalidClassDescription("property IRI is not absolute: " + iri_);
  }
  if (depth() > kMaxDepth) throw InvalidClassDescription("class description nested deeper than 8");
  if (is_restriction()) {
    property_term_ = Term::iri(iri_);
    properties_.insert(iri_);
  }
  for (const auto& op : operands_) properties_.insert(op.properties_.begin(), op.properties_.end());
  switch (kind_) {
    case Kind::Named:
      canonical_ = "<" + iri_ + ">";
      break;
    case Kind::IntersectionOf:
      canonical_ = "ObjectIntersectionOf(";
      for (std::size_t i = 0; i < operands_.size(); ++i) {
        if (i > 0) canonical_ += ' ';
        canonical_ += operands_[i].canonical_;
      }
      canonical_ += ")";
      break;
    case Kind::ObjectSomeValuesFrom:
      canonical_ = "ObjectSomeValuesFrom(<" + iri_ + "> " + operands_.front().canonical_ + ")";
      break;
    case Kind::ObjectHasValue:
      canonical_ = "ObjectHasValue(<" + iri_ + "> " + value_->key() + ")";
      break;
    case Kind::DataSomeValuesFrom:
      canonical_ = "DataSomeValuesFrom(<" + iri_ + "> <" + datatype_ + ">)";
      break;
    case Kind::DataHasValue:
      canonical_ = "DataHasValue(<" + iri_ + "> " + value_->key() + ")";
      break;
  }
}

bool ClassDescription::is_thing() const { return kind_ == Kind::Named && iri_ == vocab::kOwlThing; }

int ClassDescription::depth() const noexcept {
  int deepest = 0;
  for (const auto& op : operands_) deepest = std::max(deepest, op.depth());
  return deepest + 1;
}

std::vector<ClassDescription> ClassDescription::conjuncts() const {
  if (kind_ == Kind::IntersectionOf) return operands_;
  return {*this};
}


std::set<std::string> ClassDescription::named_classes() const {
  std::set<std::string> out;
  if (kind_ == Kind::Named) out.insert(iri_);
  for (const auto& op : operands_) out.merge(op.named_classes());
  return out;
}

namespace {

Term owl(std::string_view iri) { return Term::iri(std::string(iri)); }

Term encode(Graph& g, const ClassDescription& d, const std::string& prefix, int& counter) {
  using Kind = ClassDescription::Kind;
  if (d.kind() == Kind::Named) return Term::iri(d.iri());
  Term node = Term::blank(prefix + "_" + std::to_string(counter++));
  switch (d.kind()) {
    case Kind::IntersectionOf:
      for (const auto& m : d.members()) {
        g.insert(node, owl(vocab::kOwlIntersectionOf), encode(g, m, prefix, counter));
      }
      break;
    case Kind::ObjectSomeValuesFrom:
      g.insert(node, owl(vocab::kOwlOnProperty), Term::iri(d.iri()));
      g.insert(node, owl(vocab::kOwlSomeValuesFrom), encode(g, d.filler(), prefix, counter));
      break;
    case Kind::DataSomeValuesFrom:
      g.insert(node, owl(vocab::kOwlOnProperty), Term::iri(d.iri()));
      g.insert(node, owl(vocab::kOwlSomeValuesFrom), Term::iri(d.datatype()));
      break;
    case Kind::ObjectHasValue:
    case Kind::DataHasValue:
      g.insert(node, owl(vocab::kOwlOnProperty), Term::iri(d.iri()));
      g.insert(node, owl(vocab::kOwlHasValue), *d.value());
      break;
    case Kind::Named:
      break;
  }
  return node;
}

const Term& only(const std::vector<Term>& terms, const Term& node, std::string_view what) {
  if (terms.size() != 1) {
    throw InvalidClassDescription("node " + node.key() + " needs exactly one " + std::string(what));
  }
  return terms.front();
}

ClassDescription decode(const Graph& g, const Term& node, int depth) {
  if (depth > ClassDescription::kMaxDepth) throw InvalidClassDescription("class description nested deeper than 8");
  if (node.is_literal()) throw InvalidClassDescription("literal where a class description was expected");

  auto members = g.objects(node, owl(vocab::kOwlIntersectionOf));
  auto on_property = g.objects(node, owl(vocab::kOwlOnProperty));
  if (!members.empty() && !on_property.empty()) {
    throw InvalidClassDescription("node " + node.key() + " is both an intersection and a restriction");
  }
  if (!members.empty()) {
    std::vector<ClassDescription> decoded;
    for (const auto& m : members) decoded.push_back(decode(g, m, depth + 1));
    return ClassDescription::intersection_of(std::move(decoded));
  }
  if (!on_property.empty()) {
    const Term& property = only(on_property, node, "owl:onProperty");
    if (!property.is_iri()) throw InvalidClassDescription("owl:onProperty must be an IRI");
    auto some = g.objects(node, owl(vocab::kOwlSomeValuesFrom));
    auto has = g.objects(node, owl(vocab::kOwlHasValue));
    if (some.size() + has.size() != 1) {
      throw InvalidClassDescription("restriction " + node.key() + " needs exactly one of someValuesFrom/hasValue");
    }
    if (!some.empty()) {
      const Term& filler = some.front();
      if (filler.is_iri() && filler.value().rfind(vocab::kXsd, 0) == 0) {
        return ClassDescription::data_some_values_from(property.value(), filler.value());
      }
      return ClassDescription::object_some_values_from(property.value(), decode(g, filler, depth + 1));
    }
    const Term& value = has.front();
    if (value.is_literal()) return ClassDescription::data_has_value(property.value(), value);
    return ClassDescription::object_has_value(property.value(), value);
  }
  if (node.is_iri()) return ClassDescription::named(node.value());
  throw InvalidClassDescription("blank node " + node.key() + " has no class structure");
}

}  // namespace

Term encode_class_description(Graph& g, const ClassDescription& d, const std::string& label_prefix) {
  int counter = 0;
  return encode(g, d, label_prefix, counter);
}

void encode_class_definition(Graph& g, const Term& class_iri, const ClassDescription& d,
                             const std::string& label_prefix) {
  g.insert(class_iri, Term::iri(std::string(vocab::kRdfType)), owl(vocab::kOwlClass));
  g.insert(class_iri, owl(vocab::kOwlEquivalentClass), encode_class_description(g, d, label_prefix));
}

ClassDescription decode_class_description(const Graph& g, const Term& node) { return decode(g, node, 1); }

ClassDescription decode_class_definition(const Graph& g, const Term& class_iri) {
  auto eq = g.objects(class_iri, owl(vocab::kOwlEquivalentClass));
  if (eq.empty()) return ClassDescription::named(class_iri.value());
  return decode(g, only(eq, class_iri, "owl:equivalentClass"), 1);
}

}  // namespace semfed::rdf
