#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/rdf/graph.hpp"

namespace semfed::rdf {

class InvalidClassDescription : public Error {
 public:
  explicit InvalidClassDescription(const std::string& message)
      : Error("InvalidClassDescription", message) {}
};

// Restricted OWL class expression used to type service inputs and outputs.
//
// Intersections are normalised on construction: members are deduplicated and
// sorted by their canonical text, so equality is order-independent.
class ClassDescription {
 public:
  enum class Kind {
    Named,
    IntersectionOf,
    ObjectSomeValuesFrom,
    ObjectHasValue,
    DataSomeValuesFrom,
    DataHasValue,
  };

  static constexpr int kMaxDepth = 8;

  static ClassDescription named(std::string class_iri);
  static ClassDescription thing();
  static ClassDescription intersection_of(std::vector<ClassDescription> members);
  static ClassDescription object_some_values_from(std::string property, ClassDescription filler);
  static ClassDescription object_has_value(std::string property, Term value);
  static ClassDescription data_some_values_from(std::string property, std::string datatype);
  static ClassDescription data_has_value(std::string property, Term literal);

  Kind kind() const noexcept { return kind_; }
  bool is_thing() const;
  bool is_restriction() const noexcept { return kind_ != Kind::Named && kind_ != Kind::IntersectionOf; }

  // Class IRI for Named, property IRI for restrictions, empty for intersections.
  const std::string& iri() const noexcept { return iri_; }
  const std::string& datatype() const noexcept { return datatype_; }
  const std::optional<Term>& value() const noexcept { return value_; }
  const std::vector<ClassDescription>& members() const noexcept { return operands_; }
  const ClassDescription& filler() const { return operands_.front(); }
  // Property IRI as a term; restrictions only.
  const Term& property() const { return *property_term_; }

  int depth() const noexcept;
  // Stable functional-syntax rendering; also the sort key for intersections.
  const std::string& canonical() const noexcept { return canonical_; }

  // Top-level conjuncts: the members of an intersection, or {*this}.
  std::vector<ClassDescription> conjuncts() const;
  // Every property IRI referenced anywhere in the expression.
  const std::set<std::string>& properties() const noexcept { return properties_; }
  // Every named class IRI referenced anywhere (owl:Thing included).
  std::set<std::string> named_classes() const;

  friend bool operator==(const ClassDescription& a, const ClassDescription& b) {
    return a.canonical_ == b.canonical_;
  }
  friend bool operator<(const ClassDescription& a, const ClassDescription& b) {
    return a.canonical_ < b.canonical_;
  }

 private:
  ClassDescription() = default;
  void finish();

  Kind kind_ = Kind::Named;
  std::string iri_;
  std::string datatype_;
  std::optional<Term> value_;
  std::vector<ClassDescription> operands_;
  std::string canonical_;
  std::optional<Term> property_term_;
  std::set<std::string> properties_;
};

// Encodes `d` into `g` and returns the node standing for it: the class IRI
// itself for Named, otherwise a blank node labelled `<label_prefix>_<n>`.
// Intersections are written as repeated owl:intersectionOf triples.
Term encode_class_description(Graph& g, const ClassDescription& d, const std::string& label_prefix);

// Declares `class_iri` as an owl:Class equivalent to `d`.
void encode_class_definition(Graph& g, const Term& class_iri, const ClassDescription& d,
                             const std::string& label_prefix);

// Inverse of encode_class_description. Throws InvalidClassDescription on
// malformed structure or depth > kMaxDepth.
ClassDescription decode_class_description(const Graph& g, const Term& node);

// Follows owl:equivalentClass from `class_iri` when present, else Named.
ClassDescription decode_class_definition(const Graph& g, const Term& class_iri);

}  // namespace semfed::rdf
