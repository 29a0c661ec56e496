#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/rdf/term.hpp"

namespace semfed::query {

class DisconnectedQuery : public Error {
 public:
  explicit DisconnectedQuery(const std::string& message) : Error("DisconnectedQuery", message) {}
};

struct Variable {
  std::string name;  // without the leading '?'
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, rdf::Term>;

struct TriplePattern {
  PatternTerm subject;
  std::string predicate;  // IRI; rdf:type for `a`
  PatternTerm object;
  bool is_type() const;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct Filter {
  std::string variable;
  rdf::Term value;  // literal
  friend bool operator==(const Filter&, const Filter&) = default;
};

// Basic graph pattern with equality filters and a projection.
struct GraphQuery {
  std::vector<TriplePattern> patterns;
  std::vector<Filter> filters;
  std::vector<std::string> projection;
  std::optional<std::string> name;

  std::set<std::string> variables() const;
  friend bool operator==(const GraphQuery&, const GraphQuery&) = default;
};

// Checks the query invariants: at least one pattern, projected and
// filtered variables occur in some pattern, filters compare with literals
// (SyntaxError at line 0 otherwise) and the patterns form one connected
// graph (DisconnectedQuery). rdf:type objects do not connect patterns.
void check_query(const GraphQuery& q);

// Subset of SPARQL: PREFIX declarations, `SELECT ?v ...` or `SELECT *`,
// and a WHERE block of triple patterns using `;`, `,` and `.`, `a` for
// rdf:type, and `FILTER(?v = literal)`. Throws SyntaxError or
// DisconnectedQuery.
GraphQuery parse_query(std::string_view text);

// `?name`, or the Turtle form of a constant.
std::string to_string(const PatternTerm& t);
std::string to_string(const TriplePattern& p);

}  // namespace semfed::query
