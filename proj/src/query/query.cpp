#include "semfed/query/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::query {

bool TriplePattern::is_type() const { return predicate == vocab::kRdfType; }

std::set<std::string> GraphQuery::variables() const {
  std::set<std::string> out;
  for (const auto& p : patterns) {
    for (const auto* t : {&p.subject, &p.object}) {
      if (const auto* v = std::get_if<Variable>(t)) out.insert(v->name);
    }
  }
  return out;
}

std::string to_string(const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
  return rdf::format_term(std::get<rdf::Term>(t), {});
}

std::string to_string(const TriplePattern& p) {
  std::string predicate = p.is_type() ? "a" : "<" + p.predicate + ">";
  return to_string(p.subject) + " " + predicate + " " + to_string(p.object);
}

namespace {

// Node identity for connectivity: variables and constants by their text.
std::string node_key(const PatternTerm& t) { return to_string(t); }

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

}  // namespace

void check_query(const GraphQuery& q) {
  if (q.patterns.empty()) throw SyntaxError(0, 0, "query has no triple patterns");
  auto vars = q.variables();
  for (const auto& v : q.projection) {
    if (!vars.count(v)) throw SyntaxError(0, 0, "projected variable ?" + v + " does not occur in any pattern");
  }
  for (const auto& f : q.filters) {
    if (!vars.count(f.variable)) {
      throw SyntaxError(0, 0, "filtered variable ?" + f.variable + " does not occur in any pattern");
    }
    if (!f.value.is_literal()) throw SyntaxError(0, 0, "FILTER must compare ?" + f.variable + " with a literal");
  }
  for (const auto& p : q.patterns) {
    if (std::holds_alternative<rdf::Term>(p.subject) && std::get<rdf::Term>(p.subject).is_literal()) {
      throw SyntaxError(0, 0, "literal in subject position: " + to_string(p));
    }
  }

  // Patterns are connected when they share a subject or object node; the
  // class named by an rdf:type pattern is not a node.
  DisjointSets sets(q.patterns.size());
  std::map<std::string, std::size_t> first_use;
  for (std::size_t i = 0; i < q.patterns.size(); ++i) {
    const auto& p = q.patterns[i];
    std::vector<const PatternTerm*> nodes{&p.subject};
    if (!p.is_type() || std::holds_alternative<Variable>(p.object)) nodes.push_back(&p.object);
    for (const auto* n : nodes) {
      auto [it, fresh] = first_use.emplace(node_key(*n), i);
      if (!fresh) sets.unite(i, it->second);
    }
  }
  for (std::size_t i = 1; i < q.patterns.size(); ++i) {
    if (sets.find(i) != sets.find(0)) {
      throw DisconnectedQuery("pattern " + to_string(q.patterns[i]) + " is not connected to " +
                              to_string(q.patterns[0]));
    }
  }
}

namespace {

struct Token {
  enum class Type { Iri, PrefixedName, Var, String, Integer, Word, Punct, End };
  Type type;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t{Token::Type::End, "", line_, column_};
      if (at_end()) {
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (c == '<') {
        advance();
        while (!at_end() && peek() != '>') {
          if (std::isspace(static_cast<unsigned char>(peek()))) fail("whitespace in IRI");
          t.text += take();
        }
        if (at_end()) fail("unterminated IRI");
        advance();
        t.type = Token::Type::Iri;
      } else if (c == '?' || c == '$') {
        advance();
        while (!at_end() && is_name_char(peek())) t.text += take();
        if (t.text.empty()) fail("empty variable name");
        t.type = Token::Type::Var;
      } else if (c == '"') {
        advance();
        t.text = read_string();
        t.type = Token::Type::String;
      } else if (c == '^' && peek(1) == '^') {
        advance();
        advance();
        t.type = Token::Type::Punct;
        t.text = "^^";
      } else if (std::string_view("{}().;,=*").find(c) != std::string_view::npos) {
        t.text = std::string(1, take());
        t.type = Token::Type::Punct;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
        t.text += take();
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) t.text += take();
        if (!rdf::is_valid_lexical(t.text, vocab::kXsdInteger)) fail("malformed number");
        t.type = Token::Type::Integer;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_') {
        while (!at_end() && is_name_char(peek())) t.text += take();
        if (!at_end() && peek() == ':') {
          t.text += take();
          while (!at_end() && (is_name_char(peek()) || peek() == '.' || peek() == '-')) t.text += take();
          // A trailing '.' ends the statement rather than the local name.
          while (!t.text.empty() && t.text.back() == '.') {
            t.text.pop_back();
            --pos_;
            --column_;
          }
          t.type = Token::Type::PrefixedName;
        } else {
          t.type = Token::Type::Word;
        }
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(line_, column_, message); }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }
  char take() {
    char c = peek();
    advance();
    return c;
  }

  void skip_ws() {
    while (!at_end()) {
      if (peek() == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string read_string() {
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = take();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      char e = take();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  GraphQuery run() {
    while (keyword("PREFIX")) read_prefix();
    if (!keyword("SELECT")) fail("expected SELECT");
    bool star = false;
    std::vector<std::pair<std::string, const Token*>> projected;
    if (punct("*")) {
      star = true;
    } else {
      while (peek().type == Token::Type::Var) {
        projected.emplace_back(peek().text, &peek());
        next();
      }
      if (projected.empty()) fail("SELECT needs at least one variable");
    }
    keyword("WHERE");
    expect("{");
    std::vector<std::pair<Filter, const Token*>> filters;
    while (!punct("}")) {
      if (peek().type == Token::Type::End) fail("expected '}'");
      if (punct(".")) continue;
      if (keyword("FILTER")) {
        const Token* at = &peek();
        filters.emplace_back(read_filter(), at);
      } else {
        read_triples();
      }
    }
    if (peek().type != Token::Type::End) fail("unexpected text after '}'");
    if (q_.patterns.empty()) fail("WHERE block has no triple patterns");

    auto vars = q_.variables();
    for (const auto& [f, at] : filters) {
      if (!vars.count(f.variable)) fail_at(*at, "filtered variable ?" + f.variable + " does not occur in any pattern");
      q_.filters.push_back(f);
    }
    if (star) {
      for (const auto& p : q_.patterns) {
        for (const auto* t : {&p.subject, &p.object}) {
          const auto* v = std::get_if<Variable>(t);
          if (v && std::find(q_.projection.begin(), q_.projection.end(), v->name) == q_.projection.end()) {
            q_.projection.push_back(v->name);
          }
        }
      }
    } else {
      for (const auto& [name, at] : projected) {
        if (!vars.count(name)) fail_at(*at, "projected variable ?" + name + " does not occur in any pattern");
        if (std::find(q_.projection.begin(), q_.projection.end(), name) == q_.projection.end()) {
          q_.projection.push_back(name);
        }
      }
    }
    check_query(q_);
    return std::move(q_);
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail_at(const Token& t, const std::string& message) const {
    throw SyntaxError(t.line, t.column, message);
  }
  [[noreturn]] void fail(const std::string& message) const { fail_at(peek(), message); }

  bool keyword(std::string_view word) {
    if (peek().type != Token::Type::Word) return false;
    std::string upper = peek().text;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper != word) return false;
    next();
    return true;
  }
  bool punct(std::string_view p) {
    if (peek().type != Token::Type::Punct || peek().text != p) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!punct(p)) fail("expected '" + std::string(p) + "'");
  }

  void read_prefix() {
    const Token& name = next();
    if (name.type != Token::Type::PrefixedName || name.text.back() != ':') fail_at(name, "expected prefix name");
    const Token& iri = next();
    if (iri.type != Token::Type::Iri) fail_at(iri, "expected <IRI> after prefix name");
    prefixes_[name.text.substr(0, name.text.size() - 1)] = iri.text;
  }

  std::string expand(const Token& t) const {
    auto colon = t.text.find(':');
    auto it = prefixes_.find(t.text.substr(0, colon));
    if (it == prefixes_.end()) fail_at(t, "undeclared prefix '" + t.text.substr(0, colon) + "'");
    return it->second + t.text.substr(colon + 1);
  }

  rdf::Term iri_term(const Token& t, const std::string& iri) const {
    if (!rdf::is_absolute_iri(iri)) fail_at(t, "relative IRI <" + iri + ">");
    return rdf::Term::iri(iri);
  }

  rdf::Term read_literal() {
    const Token& t = next();
    if (t.type == Token::Type::Integer) return rdf::Term::literal(t.text, vocab::kXsdInteger);
    if (t.type != Token::Type::String) fail_at(t, "expected a literal");
    if (!punct("^^")) return rdf::Term::string_literal(t.text);
    const Token& dt = next();
    std::string datatype;
    if (dt.type == Token::Type::Iri) {
      datatype = dt.text;
    } else if (dt.type == Token::Type::PrefixedName) {
      datatype = expand(dt);
    } else {
      fail_at(dt, "expected a datatype IRI");
    }
    if (!vocab::is_supported_datatype(datatype)) fail_at(dt, "unsupported datatype <" + datatype + ">");
    if (!rdf::is_valid_lexical(t.text, datatype)) fail_at(t, "invalid lexical form \"" + t.text + "\"");
    return rdf::Term::literal(t.text, datatype);
  }

  PatternTerm read_node(bool allow_literal) {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::Var:
        next();
        return Variable{t.text};
      case Token::Type::Iri:
        next();
        return iri_term(t, t.text);
      case Token::Type::PrefixedName:
        next();
        return iri_term(t, expand(t));
      case Token::Type::String:
      case Token::Type::Integer:
        if (!allow_literal) fail("literal in subject position");
        return read_literal();
      default:
        fail("expected a variable, IRI or literal");
    }
  }

  std::string read_verb() {
    const Token& t = peek();
    if (t.type == Token::Type::Word && t.text == "a") {
      next();
      return std::string(vocab::kRdfType);
    }
    if (t.type == Token::Type::Iri) {
      next();
      return iri_term(t, t.text).value();
    }
    if (t.type == Token::Type::PrefixedName) {
      next();
      return iri_term(t, expand(t)).value();
    }
    if (t.type == Token::Type::Var) fail("variable predicates are not supported");
    fail("expected a predicate");
  }

  void read_triples() {
    PatternTerm subject = read_node(false);
    for (;;) {
      std::string predicate = read_verb();
      do {
        q_.patterns.push_back({subject, predicate, read_node(true)});
      } while (punct(","));
      if (!punct(";")) break;
      // Tolerate a dangling ';' before '.' or '}'.
      if (peek().type == Token::Type::Punct && (peek().text == "." || peek().text == "}")) break;
    }
  }

  Filter read_filter() {
    expect("(");
    Filter f{"", rdf::Term::string_literal("")};
    if (peek().type == Token::Type::Var) {
      f.variable = next().text;
      expect("=");
      f.value = read_literal();
    } else {
      f.value = read_literal();
      expect("=");
      if (peek().type != Token::Type::Var) fail("FILTER compares a variable with a literal");
      f.variable = next().text;
    }
    expect(")");
    return f;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
  GraphQuery q_;
};

}  // namespace

GraphQuery parse_query(std::string_view text) { return Parser(Lexer(text).run()).run(); }

}  // namespace semfed::query
