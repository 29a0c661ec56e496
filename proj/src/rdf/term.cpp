#include "semfed/rdf/term.hpp"

#include <cctype>
#include <stdexcept>

#include "semfed/rdf/vocab.hpp"

namespace semfed::rdf {

namespace {

std::string make_key(Term::Kind kind, const std::string& value, const std::string& datatype) {
  switch (kind) {
    case Term::Kind::Iri:
      return "<" + value + ">";
    case Term::Kind::Blank:
      return "_:" + value;
    case Term::Kind::Literal:
      return "\"" + escape_string(value) + "\"^^<" + datatype + ">";
  }
  return {};
}

bool is_blank_label(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

}  // namespace

Term::Term(Kind kind, std::string value, std::string datatype)
    : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)) {
  key_ = make_key(kind_, value_, datatype_);
}

Term Term::iri(std::string iri) {
  if (!is_absolute_iri(iri)) throw std::invalid_argument("IRI is not absolute: " + iri);
  for (char c : iri) {
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("<>\"{}|^`\\").find(c) != std::string_view::npos) {
      throw std::invalid_argument("invalid character in IRI: " + iri);
    }
  }
  return Term(Kind::Iri, std::move(iri), {});
}

Term Term::blank(std::string label) {
  if (!is_blank_label(label)) throw std::invalid_argument("invalid blank node label: " + label);
  return Term(Kind::Blank, std::move(label), {});
}

Term Term::literal(std::string lexical, std::string_view datatype) {
  if (!vocab::is_supported_datatype(datatype)) {
    throw std::invalid_argument("unsupported literal datatype: " + std::string(datatype));
  }
  if (!is_valid_lexical(lexical, datatype)) {
    throw std::invalid_argument("\"" + lexical + "\" is not a valid " + std::string(datatype));
  }
  return Term(Kind::Literal, std::move(lexical), std::string(datatype));
}

Term Term::string_literal(std::string lexical) {
  return literal(std::move(lexical), vocab::kXsdString);
}

bool is_absolute_iri(std::string_view iri) {
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < iri.size(); ++i) {
    char c = iri[i];
    if (c == ':') return true;
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) {
      return false;
    }
  }
  return false;
}

bool is_valid_lexical(std::string_view lexical, std::string_view datatype) {
  if (datatype == vocab::kXsdString) return true;
  if (lexical.empty() || (datatype == vocab::kXsdGYear && lexical[0] == '+')) return false;
  std::size_t i = lexical[0] == '-' || lexical[0] == '+' ? 1 : 0;
  std::size_t digits = lexical.size() - i;
  if (digits == 0) return false;
  for (; i < lexical.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(lexical[i]))) return false;
  }
  return datatype == vocab::kXsdInteger || digits >= 4;
}

std::string escape_string(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size());
  for (char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view local_name(std::string_view iri) {
  auto pos = iri.find_last_of("#/");
  if (pos == std::string_view::npos) return iri;
  return iri.substr(pos + 1);
}

}  // namespace semfed::rdf
