#include "semfed/rdf/turtle.hpp"

#include <cctype>
#include <optional>
#include <regex>
#include <set>

#include "semfed/error.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::rdf {

namespace {

bool is_prefix_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool is_local_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view text) : text_(text) {
    static const std::regex label_re("_:([A-Za-z0-9_-]+)");
    std::string s(text);
    for (std::sregex_iterator it(s.begin(), s.end(), label_re), end; it != end; ++it) {
      explicit_labels_.insert((*it)[1].str());
    }
  }

  Graph read() {
    skip_ws();
    while (!at_end()) {
      if (peek() == '@') {
        read_prefix();
      } else {
        read_statement();
      }
      skip_ws();
    }
    return std::move(graph_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(line_, column_, message); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void read_prefix() {
    static constexpr std::string_view kKeyword = "@prefix";
    if (text_.substr(pos_, kKeyword.size()) != kKeyword) fail("unsupported directive");
    for (std::size_t i = 0; i < kKeyword.size(); ++i) advance();
    skip_ws();
    std::string name;
    while (!at_end() && is_prefix_char(peek())) {
      name += peek();
      advance();
    }
    if (!name.empty() && !std::isalpha(static_cast<unsigned char>(name[0]))) {
      fail("prefix name must start with a letter");
    }
    if (peek() != ':') fail("expected ':' after prefix name");
    advance();
    skip_ws();
    std::string iri = read_iriref();
    expect('.');
    graph_.set_prefix(std::move(name), std::move(iri));
  }

  std::string read_iriref() {
    if (peek() != '<') fail("expected '<'");
    advance();
    std::string iri;
    while (!at_end() && peek() != '>') {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) ||
          std::string_view("<\"{}|^`\\").find(c) != std::string_view::npos) {
        fail("invalid character in IRI");
      }
      iri += c;
      advance();
    }
    if (at_end()) fail("unterminated IRI");
    advance();
    if (!is_absolute_iri(iri)) fail("relative IRI <" + iri + "> (no base IRI support)");
    return iri;
  }

  std::string read_prefixed_name() {
    std::string prefix;
    while (!at_end() && is_prefix_char(peek())) {
      prefix += peek();
      advance();
    }
    if (peek() != ':') fail("expected prefixed name");
    advance();
    std::string local;
    while (!at_end() && is_local_char(peek())) {
      local += peek();
      advance();
    }
    // A trailing '.' terminates the statement, it is not part of the name.
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
      --column_;
    }
    auto it = graph_.prefixes().find(prefix);
    if (it == graph_.prefixes().end()) fail("undeclared prefix '" + prefix + ":'");
    std::string iri = it->second + local;
    if (!is_absolute_iri(iri)) fail("prefixed name does not expand to an absolute IRI");
    return iri;
  }

  std::string read_iri() {
    skip_ws();
    if (peek() == '<') return read_iriref();
    return read_prefixed_name();
  }

  bool at_keyword_a() const {
    return peek() == 'a' && !is_local_char(peek(1)) && peek(1) != ':';
  }

  Term read_blank_label() {
    advance();  // '_'
    if (peek() != ':') fail("expected ':' after '_'");
    advance();
    std::string label;
    while (!at_end() && is_label_char(peek())) {
      label += peek();
      advance();
    }
    if (label.empty()) fail("empty blank node label");
    return Term::blank(std::move(label));
  }

  Term fresh_blank() {
    std::string label;
    do {
      label = "b" + std::to_string(next_blank_++);
    } while (explicit_labels_.count(label) > 0);
    return Term::blank(std::move(label));
  }

  Term read_property_list_node() {
    if (in_brackets_) fail("nested blank node property lists are not supported");
    advance();  // '['
    Term node = fresh_blank();
    skip_ws();
    if (peek() != ']') {
      in_brackets_ = true;
      read_predicate_object_list(node);
      in_brackets_ = false;
    }
    expect(']');
    return node;
  }

  Term read_subject() {
    skip_ws();
    char c = peek();
    if (c == '_') return read_blank_label();
    if (c == '[') return read_property_list_node();
    if (c == '<' || is_prefix_char(c) || c == ':') return Term::iri(read_iri());
    if (c == '(') fail("collections are not supported");
    fail("expected subject");
  }

  Term read_string_literal() {
    advance();  // opening quote
    if (peek() == '"' && peek(1) == '"') fail("long strings are not supported");
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = peek();
      if (c == '"') break;
      if (c == '\n') fail("newline in string");
      if (c == '\\') {
        advance();
        switch (peek()) {
          case '"': lexical += '"'; break;
          case '\\': lexical += '\\'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 't': lexical += '\t'; break;
          default: fail("unsupported escape sequence");
        }
        advance();
        continue;
      }
      lexical += c;
      advance();
    }
    advance();  // closing quote
    if (peek() == '@') fail("language-tagged literals are not supported");
    std::string datatype(vocab::kXsdString);
    if (peek() == '^' && peek(1) == '^') {
      advance();
      advance();
      datatype = read_iri();
      if (!vocab::is_supported_datatype(datatype)) fail("unsupported datatype <" + datatype + ">");
    }
    if (!is_valid_lexical(lexical, datatype)) fail("invalid lexical form for <" + datatype + ">");
    return Term::literal(std::move(lexical), datatype);
  }

  Term read_object() {
    skip_ws();
    char c = peek();
    if (c == '"') return read_string_literal();
    if (c == '_') return read_blank_label();
    if (c == '[') return read_property_list_node();
    if (c == '(') fail("collections are not supported");
    if (c == '<' || c == ':' || std::isalpha(static_cast<unsigned char>(c))) return Term::iri(read_iri());
    fail("expected object");
  }

  Term read_verb() {
    skip_ws();
    if (at_keyword_a()) {
      advance();
      return Term::iri(std::string(vocab::kRdfType));
    }
    if (peek() == '_' || peek() == '"' || peek() == '[') fail("predicate must be an IRI");
    return Term::iri(read_iri());
  }

  void read_predicate_object_list(const Term& subject) {
    while (true) {
      Term predicate = read_verb();
      while (true) {
        Term object = read_object();
        graph_.insert(subject, predicate, std::move(object));
        skip_ws();
        if (peek() != ',') break;
        advance();
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        advance();
        skip_ws();
      }
      // `;` may be followed directly by the terminator.
      if (peek() == '.' || peek() == ']') return;
    }
  }

  void read_statement() {
    skip_ws();
    bool bracketed = peek() == '[';
    Term subject = read_subject();
    skip_ws();
    bool bare_property_list = bracketed && peek() == '.';
    if (!bare_property_list) read_predicate_object_list(subject);
    expect('.');
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  bool in_brackets_ = false;
  std::size_t next_blank_ = 0;
  std::set<std::string> explicit_labels_;
  Graph graph_;
};

bool is_serializable_local(std::string_view local) {
  for (char c : local) {
    if (!is_local_char(c)) return false;
  }
  return local.empty() || local.back() != '.';
}

std::string format_iri(const std::string& iri, const PrefixMap& prefixes) {
  const std::string* best_prefix = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, ns] : prefixes) {
    if (ns.size() > best_len && iri.compare(0, ns.size(), ns) == 0 &&
        is_serializable_local(std::string_view(iri).substr(ns.size()))) {
      best_prefix = &prefix;
      best_len = ns.size();
    }
  }
  if (best_prefix != nullptr) return *best_prefix + ":" + iri.substr(best_len);
  return "<" + iri + ">";
}

}  // namespace

Graph parse_turtle(std::string_view text) { return TurtleReader(text).read(); }

std::string format_term(const Term& t, const PrefixMap& prefixes) {
  switch (t.kind()) {
    case Term::Kind::Iri:
      return format_iri(t.value(), prefixes);
    case Term::Kind::Blank:
      return "_:" + t.value();
    case Term::Kind::Literal: {
      std::string out = "\"" + escape_string(t.value()) + "\"";
      if (t.datatype() != vocab::kXsdString) out += "^^" + format_iri(t.datatype(), prefixes);
      return out;
    }
  }
  return {};
}

std::string serialize_turtle(const Graph& g) {
  std::string out;
  for (const auto& [prefix, iri] : g.prefixes()) {
    out += "@prefix " + prefix + ": <" + iri + "> .\n";
  }
  if (!g.empty() && !g.prefixes().empty()) out += "\n";
  for (const auto& t : g) {
    out += format_term(t.subject, g.prefixes());
    out += ' ';
    out += t.predicate.value() == vocab::kRdfType ? std::string("a") : format_term(t.predicate, g.prefixes());
    out += ' ';
    out += format_term(t.object, g.prefixes());
    out += " .\n";
  }
  return out;
}

}  // namespace semfed::rdf
