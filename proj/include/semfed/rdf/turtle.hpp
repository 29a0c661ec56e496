#pragma once

#include <string>
#include <string_view>

#include "semfed/rdf/graph.hpp"

namespace semfed::rdf {

// Reads the Turtle subset: `@prefix`, `S P O .` statements with `;` and `,`
// lists, `a`, prefixed names, `<IRI>`, quoted strings with an optional
// `^^` datatype (xsd:string, xsd:integer, xsd:gYear), `_:label` blank nodes
// and one level of `[ p o ]` blank-node property lists. `#` starts a comment.
//
// Throws SyntaxError on anything else.
Graph parse_turtle(std::string_view text);

// Writes `g` as prefix declarations followed by one statement per triple in
// canonical order. parse_turtle(serialize_turtle(g)) == g.
std::string serialize_turtle(const Graph& g);

// Renders a single term the way serialize_turtle would under `prefixes`.
std::string format_term(const Term& t, const PrefixMap& prefixes);

}  // namespace semfed::rdf
