#include <gtest/gtest.h>

#include "semfed/query/query.hpp"
#include "semfed/rdf/vocab.hpp"
#include "support/fixture.hpp"

namespace semfed::query {
namespace {

using rdf::Term;

const std::string kDom = "http://fixture.local/malaria#";

TEST(ParseQueryTest, FirstFixtureQuery) {
  auto q = parse_query(semfed::testing::read_fixture("malaria/q1.rq"));
  ASSERT_EQ(q.patterns.size(), 4u);
  EXPECT_EQ(q.patterns[0], (TriplePattern{Variable{"inter"}, std::string(vocab::kRdfType),
                                          Term::iri(kDom + "IndoorResidualSpraying")}));
  EXPECT_EQ(q.patterns[1], (TriplePattern{Variable{"inter"}, kDom + "has_name", Variable{"inter_name"}}));
  EXPECT_EQ(q.patterns[2], (TriplePattern{Variable{"inter"}, kDom + "has_insecticide", Variable{"ins"}}));
  EXPECT_EQ(q.patterns[3], (TriplePattern{Variable{"ins"}, kDom + "has_name", Variable{"ins_name"}}));
  EXPECT_EQ(q.filters, (std::vector<Filter>{{"ins_name", Term::string_literal("Permethrin")}}));
  EXPECT_EQ(q.projection, (std::vector<std::string>{"inter", "inter_name"}));
}

TEST(ParseQueryTest, SecondFixtureQueryKeepsConstantsAndTypedFilters) {
  auto q = parse_query(semfed::testing::read_fixture("malaria/q2.rq"));
  EXPECT_EQ(q.patterns.size(), 14u);
  EXPECT_EQ(q.patterns[1].object, PatternTerm(Term::iri("http://fixture.local/id/insecticide/2")));
  ASSERT_EQ(q.filters.size(), 6u);
  EXPECT_EQ(q.filters[0].value, Term::literal("2015", vocab::kXsdGYear));
}

TEST(ParseQueryTest, SinglePattern) {
  auto q = parse_query("PREFIX : <http://fixture.local/malaria#> SELECT ?x WHERE { ?x a :Insecticide }");
  ASSERT_EQ(q.patterns.size(), 1u);
  EXPECT_TRUE(q.patterns[0].is_type());
}

TEST(ParseQueryTest, ObjectListsStarAndLowercaseKeywords) {
  auto q = parse_query(
      "prefix ex: <http://ex.org/>\n"
      "select * { ?a ex:p ?b , ?c ; ex:q 42 . ?b ex:r <http://ex.org/k> ; }");
  EXPECT_EQ(q.patterns.size(), 4u);
  EXPECT_EQ(q.projection, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(q.patterns[2].object, PatternTerm(Term::literal("42", vocab::kXsdInteger)));
}

TEST(ParseQueryTest, FilterWithLiteralOnTheLeft) {
  auto q = parse_query("SELECT ?a WHERE { ?a <http://ex.org/p> ?b . FILTER(\"x\" = ?b) }");
  EXPECT_EQ(q.filters, (std::vector<Filter>{{"b", Term::string_literal("x")}}));
}

void expect_syntax_error(const std::string& text, std::size_t line) {
  try {
    parse_query(text);
    FAIL() << "accepted: " << text;
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

TEST(ParseQueryTest, SyntaxErrors) {
  expect_syntax_error("SELECT ?a WHERE {\n ?a <http://ex.org/p> ?b .\n FILTER(?z = \"x\") }", 3);
  expect_syntax_error("SELECT ?z WHERE { ?a <http://ex.org/p> ?b }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a nope:p ?b }", 1);
  expect_syntax_error("SELECT ?a WHERE { }", 1);
  expect_syntax_error("SELECT WHERE { ?a <http://ex.org/p> ?b }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a ?p ?b }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a <http://ex.org/p> ?b . FILTER(?b = <http://ex.org/x>) }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a <http://ex.org/p> \"x\"^^<http://ex.org/dt> }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a <http://ex.org/p> \"x\" ", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a <http://ex.org/p> ?b } extra", 1);
  expect_syntax_error("SELECT ?a WHERE { \"lit\" <http://ex.org/p> ?a }", 1);
  expect_syntax_error("SELECT ?a WHERE { ?a <rel> ?b }", 1);
}

TEST(ParseQueryTest, DisconnectedPatterns) {
  EXPECT_THROW(parse_query("PREFIX : <http://ex.org/> SELECT ?a WHERE { ?a a :C . ?b a :C }"), DisconnectedQuery);
  EXPECT_THROW(parse_query("PREFIX : <http://ex.org/> SELECT ?a WHERE { ?a :p ?x . ?b :p ?y }"), DisconnectedQuery);
  // A shared constant connects.
  EXPECT_NO_THROW(parse_query("PREFIX : <http://ex.org/> SELECT ?a WHERE { ?a :p :k . ?b :q :k }"));
}

TEST(CheckQueryTest, ProgrammaticQueries) {
  GraphQuery q;
  EXPECT_THROW(check_query(q), SyntaxError);
  q.patterns.push_back({Variable{"a"}, "http://ex.org/p", Variable{"b"}});
  q.projection = {"a"};
  EXPECT_NO_THROW(check_query(q));
  q.filters.push_back({"c", Term::string_literal("x")});
  EXPECT_THROW(check_query(q), SyntaxError);
  q.filters = {{"b", Term::iri("http://ex.org/x")}};
  EXPECT_THROW(check_query(q), SyntaxError);
}

TEST(QueryToStringTest, RendersPatterns) {
  TriplePattern p{Variable{"ins"}, kDom + "has_name", Variable{"ins_name"}};
  EXPECT_EQ(to_string(p), "?ins <" + kDom + "has_name> ?ins_name");
  TriplePattern t{Variable{"x"}, std::string(vocab::kRdfType), Term::iri(kDom + "Insecticide")};
  EXPECT_EQ(to_string(t), "?x a <" + kDom + "Insecticide>");
}

}  // namespace
}  // namespace semfed::query
