#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace semfed::rdf {

// An RDF term: IRI, blank node or typed literal.
//
// Every term caches its N-Triples style serialization (`<iri>`, `_:label`,
// `"lex"^^<dt>`); equality and ordering are defined on that key, which gives
// the canonical lexicographic order used by graphs and golden outputs.
class Term {
 public:
  enum class Kind { Iri, Blank, Literal };

  // Throws std::invalid_argument unless `iri` is absolute.
  static Term iri(std::string iri);
  static Term blank(std::string label);
  // Throws std::invalid_argument for datatypes outside the supported set.
  static Term literal(std::string lexical, std::string_view datatype);
  static Term string_literal(std::string lexical);

  Kind kind() const noexcept { return kind_; }
  bool is_iri() const noexcept { return kind_ == Kind::Iri; }
  bool is_blank() const noexcept { return kind_ == Kind::Blank; }
  bool is_literal() const noexcept { return kind_ == Kind::Literal; }

  // IRI string, blank label or lexical form.
  const std::string& value() const noexcept { return value_; }
  // Datatype IRI; empty unless literal.
  const std::string& datatype() const noexcept { return datatype_; }
  const std::string& key() const noexcept { return key_; }

  friend bool operator==(const Term& a, const Term& b) noexcept { return a.key_ == b.key_; }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
    return a.key_.compare(b.key_) <=> 0;
  }

 private:
  Term(Kind kind, std::string value, std::string datatype);

  Kind kind_ = Kind::Iri;
  std::string value_;
  std::string datatype_;
  std::string key_;
};

// True when `iri` starts with a URI scheme followed by ':'.
bool is_absolute_iri(std::string_view iri);

// Lexical-form check: xsd:integer is an optionally signed digit string,
// xsd:gYear at least four digits with an optional leading '-'.
bool is_valid_lexical(std::string_view lexical, std::string_view datatype);

// Escapes `"`, `\`, and control characters for a quoted Turtle string.
std::string escape_string(std::string_view lexical);

// Local part of an IRI: text after the last '#' or '/'.
std::string_view local_name(std::string_view iri);

}  // namespace semfed::rdf
