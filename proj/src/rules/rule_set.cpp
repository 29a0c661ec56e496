#include "semfed/rules/rule_set.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>

#include "semfed/rdf/term.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::rules {

std::size_t BodyAtom::position_of(std::string_view variable) const {
  auto it = std::find(variables.begin(), variables.end(), variable);
  if (it == variables.end()) throw RuleError("variable ?" + std::string(variable) + " not bound by db_" + table);
  return static_cast<std::size_t>(it - variables.begin());
}

const IdentityFunction* RuleSet::function(std::string_view name) const {
  auto it = functions_.find(std::string(name));
  return it == functions_.end() ? nullptr : &it->second;
}

std::vector<const MembershipRule*> RuleSet::rules_for_class(std::string_view class_iri) const {
  std::vector<const MembershipRule*> out;
  for (const auto& r : membership_) {
    if (r.class_iri == class_iri) out.push_back(&r);
  }
  return out;
}

std::vector<const PropertyRule*> RuleSet::rules_for_property(std::string_view property_iri) const {
  std::vector<const PropertyRule*> out;
  for (const auto& r : properties_) {
    if (r.property_iri == property_iri) out.push_back(&r);
  }
  return out;
}

namespace {

struct Token {
  enum class Kind { LParen, RParen, Equals, Implies, Var, Name, Iri, End } kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      std::size_t line = line_, column = column_;
      if (pos_ >= text_.size()) {
        out.push_back({Token::Kind::End, "", line, column});
        return out;
      }
      char c = text_[pos_];
      if (c == '(') {
        advance();
        out.push_back({Token::Kind::LParen, "(", line, column});
      } else if (c == ')') {
        advance();
        out.push_back({Token::Kind::RParen, ")", line, column});
      } else if (c == '=') {
        advance();
        out.push_back({Token::Kind::Equals, "=", line, column});
      } else if (c == ':' && peek(1) == '-') {
        advance();
        advance();
        out.push_back({Token::Kind::Implies, ":-", line, column});
      } else if (c == '?') {
        advance();
        std::string name = take_while([](char ch) { return is_name_char(ch); });
        if (name.empty()) throw SyntaxError(line, column, "empty variable name");
        out.push_back({Token::Kind::Var, name, line, column});
      } else if (c == '<') {
        advance();
        std::string iri;
        while (pos_ < text_.size() && text_[pos_] != '>') {
          if (std::isspace(static_cast<unsigned char>(text_[pos_]))) throw SyntaxError(line, column, "unterminated IRI");
          iri += text_[pos_];
          advance();
        }
        if (pos_ >= text_.size()) throw SyntaxError(line, column, "unterminated IRI");
        advance();
        out.push_back({Token::Kind::Iri, iri, line, column});
      } else if (is_name_char(c) || c == ':') {
        std::string name = take_while([](char ch) { return is_name_char(ch) || ch == ':'; });
        if (name.size() >= 2 && name.substr(name.size() - 2) == ":-") {
          throw SyntaxError(line, column, "missing space before ':-'");
        }
        out.push_back({Token::Kind::Name, name, line, column});
      } else {
        throw SyntaxError(line, column, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  }

  char peek(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::string out;
    while (pos_ < text_.size() && pred(text_[pos_])) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// A term in a rule head or equation: `?v` or `f(?v)` / `f(g(?v))`.
struct Application {
  std::string function;
  std::string variable;
  std::unique_ptr<Application> inner;
  Token at;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const relational::RelationalSchema& schema)
      : tokens_(std::move(tokens)), schema_(schema) {}

  void run(std::map<std::string, std::string>& prefixes, std::vector<MembershipRule>& membership,
           std::vector<PropertyRule>& properties, std::vector<std::pair<std::string, std::string>>& pairs,
           std::vector<std::string>& warnings) {
    prefixes_ = &prefixes;
    std::size_t open_groups = 0;
    while (peek().kind != Token::Kind::End) {
      if (is_name("Prefix")) {
        parse_prefix();
      } else if (is_name("Group")) {
        next();
        expect(Token::Kind::LParen, "'(' after Group");
        ++open_groups;
      } else if (is_name("Forall")) {
        parse_forall(membership, properties, pairs, warnings);
      } else if (peek().kind == Token::Kind::RParen && open_groups > 0) {
        next();
        --open_groups;
      } else {
        fail(peek(), "expected Prefix, Group or Forall");
      }
    }
    if (open_groups > 0) fail(peek(), "unclosed Group");
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool is_name(std::string_view s) const { return peek().kind == Token::Kind::Name && peek().text == s; }

  [[noreturn]] static void fail(const Token& t, const std::string& message) {
    throw SyntaxError(t.line, t.column, message);
  }

  const Token& expect(Token::Kind kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    return next();
  }

  void parse_prefix() {
    next();
    expect(Token::Kind::LParen, "'(' after Prefix");
    const Token& name = expect(Token::Kind::Name, "prefix name");
    if (name.text.back() != ':' || std::count(name.text.begin(), name.text.end(), ':') != 1) {
      fail(name, "prefix name must end with ':'");
    }
    const Token& iri = expect(Token::Kind::Iri, "prefix IRI");
    if (!rdf::is_absolute_iri(iri.text)) fail(iri, "prefix IRI must be absolute");
    expect(Token::Kind::RParen, "')' closing Prefix");
    (*prefixes_)[name.text.substr(0, name.text.size() - 1)] = iri.text;
  }

  std::string expand(const Token& t) {
    if (t.kind == Token::Kind::Iri) return t.text;
    auto colon = t.text.find(':');
    std::string prefix = colon == std::string::npos ? "" : t.text.substr(0, colon);
    std::string local = colon == std::string::npos ? t.text : t.text.substr(colon + 1);
    auto it = prefixes_->find(prefix);
    if (it == prefixes_->end()) fail(t, "no Prefix declaration for '" + prefix + ":' (needed by " + t.text + ")");
    return it->second + local;
  }

  Application parse_application() {
    Application a;
    a.at = peek();
    if (peek().kind == Token::Kind::Var) {
      a.variable = next().text;
      return a;
    }
    const Token& f = expect(Token::Kind::Name, "function name or variable");
    if (f.text.find(':') != std::string::npos) fail(f, "function names cannot be prefixed");
    a.function = f.text;
    expect(Token::Kind::LParen, "'(' after " + f.text);
    if (peek().kind == Token::Kind::Var) {
      a.variable = next().text;
    } else {
      a.inner = std::make_unique<Application>(parse_application());
    }
    expect(Token::Kind::RParen, "')' closing " + f.text);
    return a;
  }

  void parse_forall(std::vector<MembershipRule>& membership, std::vector<PropertyRule>& properties,
                    std::vector<std::pair<std::string, std::string>>& pairs, std::vector<std::string>& warnings) {
    next();
    std::vector<std::string> quantified;
    std::set<std::string> seen;
    while (peek().kind == Token::Kind::Var) {
      const Token& v = next();
      if (!seen.insert(v.text).second) fail(v, "variable ?" + v.text + " quantified twice");
      quantified.push_back(v.text);
    }
    if (quantified.empty()) fail(peek(), "Forall needs at least one variable");
    expect(Token::Kind::LParen, "'(' opening the Forall body");

    const Token head = peek();
    if (head.kind != Token::Kind::Name && head.kind != Token::Kind::Iri) fail(head, "expected a rule head or equation");
    // Equations start with a bare function name followed by a nested call.
    std::size_t save = pos_;
    next();
    if (peek().kind != Token::Kind::LParen) fail(peek(), "expected '('");
    next();
    bool equation = false;
    if (peek().kind == Token::Kind::Name && head.kind == Token::Kind::Name &&
        head.text.find(':') == std::string::npos) {
      // `p(f(?x) ...)` is a rule, `inv(f(?x)) = ?x` an equation: look for '='
      // right after the outer call closes.
      std::size_t depth = 1, i = pos_;
      while (i < tokens_.size() && depth > 0) {
        if (tokens_[i].kind == Token::Kind::LParen) ++depth;
        if (tokens_[i].kind == Token::Kind::RParen) --depth;
        ++i;
      }
      equation = i < tokens_.size() && tokens_[i].kind == Token::Kind::Equals;
    }
    pos_ = save;

    if (equation) {
      Application outer = parse_application();
      expect(Token::Kind::Equals, "'='");
      const Token& rhs = expect(Token::Kind::Var, "variable on the right of '='");
      if (!outer.inner || !outer.inner->variable.size() || outer.inner->inner) {
        fail(head, "identity equations have the form inv(f(?x)) = ?x");
      }
      if (outer.inner->variable != rhs.text) fail(rhs, "equation must return the variable it starts from");
      if (!seen.count(rhs.text)) fail(rhs, "variable ?" + rhs.text + " is not quantified");
      if (quantified.size() != 1) fail(head, "identity equations quantify exactly one variable");
      if (outer.function == outer.inner->function) fail(head, "a function cannot be its own inverse");
      pairs.emplace_back(outer.function, outer.inner->function);
      expect(Token::Kind::RParen, "')' closing the Forall body");
      return;
    }

    const Token& pred = next();
    std::string pred_iri = expand(pred);
    expect(Token::Kind::LParen, "'(' after " + pred.text);
    std::vector<Application> args;
    while (peek().kind != Token::Kind::RParen) {
      if (args.size() == 2) fail(peek(), "rule heads take one or two arguments");
      args.push_back(parse_application());
    }
    next();
    if (args.empty()) fail(pred, "rule head has no arguments");
    for (const auto& a : args) {
      if (a.inner) fail(a.at, "nested function applications are not supported in rule heads");
    }
    if (args[0].function.empty()) fail(args[0].at, "rule subject must be an identity function application");
    expect(Token::Kind::Implies, "':-'");

    const Token& body_pred = expect(Token::Kind::Name, "db_<table> body atom");
    if (body_pred.text.rfind("db_", 0) != 0) fail(body_pred, "body predicate must be db_<table>");
    BodyAtom body;
    body.table = body_pred.text.substr(3);
    expect(Token::Kind::LParen, "'(' after " + body_pred.text);
    while (peek().kind == Token::Kind::Var) {
      const Token& v = next();
      if (!seen.count(v.text)) fail(v, "variable ?" + v.text + " is not quantified");
      if (std::find(body.variables.begin(), body.variables.end(), v.text) != body.variables.end()) {
        fail(v, "variable ?" + v.text + " repeated in the body");
      }
      body.variables.push_back(v.text);
    }
    expect(Token::Kind::RParen, "')' closing " + body_pred.text);
    expect(Token::Kind::RParen, "')' closing the Forall body");

    const relational::TableDef* table = schema_.find(body.table);
    if (table == nullptr) throw UnknownTable(body.table);
    if (table->columns.size() != body.variables.size()) {
      throw ArityMismatch(body_pred.text, table->columns.size(), body.variables.size());
    }
    for (const auto& a : args) {
      if (std::find(body.variables.begin(), body.variables.end(), a.variable) == body.variables.end()) {
        fail(a.at, "head variable ?" + a.variable + " does not occur in the body");
      }
    }
    for (const auto& q : quantified) {
      if (std::find(body.variables.begin(), body.variables.end(), q) == body.variables.end()) {
        warnings.push_back("rule for " + pred.text + " quantifies ?" + q + " but " + body_pred.text +
                           " does not bind it");
      }
    }

    if (args.size() == 1) {
      membership.push_back({quantified, pred_iri, args[0].function, args[0].variable, std::move(body)});
    } else {
      PropertyRule r;
      r.quantified = quantified;
      r.property_iri = pred_iri;
      r.subject_function = args[0].function;
      r.subject_variable = args[0].variable;
      if (!args[1].function.empty()) r.object_function = args[1].function;
      r.object_variable = args[1].variable;
      r.body = std::move(body);
      properties.push_back(std::move(r));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const relational::RelationalSchema& schema_;
  std::map<std::string, std::string>* prefixes_ = nullptr;
};

// Function applications in rule heads, with the table column they apply to.
struct Use {
  std::string function;
  std::string table;
  std::string column;
};

}  // namespace

RuleSet parse_rules(std::string_view text, const relational::RelationalSchema& schema) {
  RuleSet rs;
  std::vector<std::pair<std::string, std::string>> pairs;
  Parser(Lexer(text).run(), schema).run(rs.prefixes_, rs.membership_, rs.properties_, pairs, rs.warnings_);

  std::map<std::string, std::string> partner;
  for (const auto& [a, b] : pairs) {
    for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      auto [it, inserted] = partner.emplace(x, y);
      if (!inserted && it->second != y) {
        throw RuleError(x + " is declared inverse of both " + it->second + " and " + y);
      }
    }
  }

  std::vector<Use> uses;
  auto column_at = [&](const BodyAtom& body, std::size_t i) { return schema.find(body.table)->columns[i].name; };
  for (const auto& r : rs.membership_) uses.push_back({r.function, r.body.table, column_at(r.body, r.key_position())});
  for (const auto& r : rs.properties_) {
    uses.push_back({r.subject_function, r.body.table, column_at(r.body, r.subject_position())});
    if (r.object_function) uses.push_back({*r.object_function, r.body.table, column_at(r.body, r.object_position())});
  }

  // A function belongs to the table whose primary key it is applied to; a
  // function only ever applied to foreign-key columns belongs to the target.
  std::map<std::string, std::string> direct, via_fk;
  for (const auto& u : uses) {
    const auto* def = schema.find(u.table);
    if (def->primary_key == u.column) {
      auto [it, inserted] = direct.emplace(u.function, u.table);
      if (!inserted && it->second != u.table) {
        throw RuleError(u.function + " is applied to the keys of both " + it->second + " and " + u.table);
      }
    } else if (const auto* fk = def->foreign_key(u.column); fk != nullptr && fk->target_column ==
                                                               schema.find(fk->table)->primary_key) {
      via_fk.emplace(u.function, fk->table);
    }
  }
  for (const auto& u : uses) {
    if (rs.functions_.count(u.function)) continue;
    auto it = direct.find(u.function);
    std::string table;
    if (it != direct.end()) {
      table = it->second;
    } else if (auto fk = via_fk.find(u.function); fk != via_fk.end()) {
      table = fk->second;
    } else {
      throw RuleError(u.function + " is never applied to a primary key");
    }
    auto inv = partner.find(u.function);
    if (inv == partner.end()) throw RuleError("identity function " + u.function + " has no declared inverse");
    rs.functions_[u.function] = {u.function, inv->second, table, schema.find(table)->primary_key};
  }

  for (const auto& r : rs.membership_) rs.arities_["db_" + r.body.table] = r.body.variables.size();
  for (const auto& r : rs.properties_) rs.arities_["db_" + r.body.table] = r.body.variables.size();
  return rs;
}

namespace {

std::string iri_text(const std::string& iri, const std::map<std::string, std::string>& prefixes) {
  std::string best_prefix;
  std::size_t best = 0;
  for (const auto& [p, ns] : prefixes) {
    if (ns.size() > best && iri.compare(0, ns.size(), ns) == 0) {
      std::string local = iri.substr(ns.size());
      bool ok = !local.empty() && std::all_of(local.begin(), local.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
      });
      if (ok) {
        best = ns.size();
        best_prefix = p;
      }
    }
  }
  if (best == 0) return "<" + iri + ">";
  std::string local = iri.substr(best);
  return best_prefix.empty() ? local : best_prefix + ":" + local;
}

std::string forall(const std::vector<std::string>& vars) {
  std::string out = "Forall";
  for (const auto& v : vars) out += " ?" + v;
  return out + " (\n  ";
}

std::string body_text(const BodyAtom& b) {
  std::string out = "db_" + b.table + "(";
  for (std::size_t i = 0; i < b.variables.size(); ++i) out += (i ? " ?" : "?") + b.variables[i];
  return out + ")";
}

}  // namespace

std::string serialize_rules(const RuleSet& rs) {
  std::string out;
  for (const auto& [p, ns] : rs.prefixes()) out += "Prefix(" + p + ": <" + ns + ">)\n";
  out += "Group (\n";
  for (const auto& [name, f] : rs.identity_functions()) {
    out += "Forall ?k (" + f.inverse + "(" + name + "(?k)) = ?k)\n";
    out += "Forall ?P (" + name + "(" + f.inverse + "(?P)) = ?P)\n";
  }
  for (const auto& r : rs.membership_rules()) {
    out += forall(r.quantified) + iri_text(r.class_iri, rs.prefixes()) + "(" + r.function + "(?" + r.variable +
           ")) :-\n  " + body_text(r.body) + ")\n";
  }
  for (const auto& r : rs.property_rules()) {
    std::string object = r.object_function ? *r.object_function + "(?" + r.object_variable + ")" : "?" + r.object_variable;
    out += forall(r.quantified) + iri_text(r.property_iri, rs.prefixes()) + "(" + r.subject_function + "(?" +
           r.subject_variable + ") " + object + ") :-\n  " + body_text(r.body) + ")\n";
  }
  out += ")\n";
  return out;
}

namespace {

void collect_missing(const RuleSet& rs, const rdf::ClassDescription& d, const ontology::DomainOntology& ont,
                     std::set<MissingMapping>& out) {
  using Kind = rdf::ClassDescription::Kind;
  switch (d.kind()) {
    case Kind::Named: {
      if (d.is_thing()) return;
      bool covered = std::any_of(rs.membership_rules().begin(), rs.membership_rules().end(), [&](const auto& r) {
        return r.class_iri == d.iri() || ont.is_subclass_of(r.class_iri, d.iri());
      });
      if (!covered) out.insert({d.iri()});
      return;
    }
    case Kind::IntersectionOf:
      for (const auto& m : d.members()) collect_missing(rs, m, ont, out);
      return;
    case Kind::ObjectSomeValuesFrom:
    case Kind::ObjectHasValue: {
      auto rules = rs.rules_for_property(d.iri());
      bool covered = std::any_of(rules.begin(), rules.end(), [](const auto* r) { return r->object_function.has_value(); });
      if (!covered) out.insert({d.iri()});
      if (d.kind() == Kind::ObjectSomeValuesFrom) collect_missing(rs, d.filler(), ont, out);
      return;
    }
    case Kind::DataSomeValuesFrom:
    case Kind::DataHasValue: {
      auto rules = rs.rules_for_property(d.iri());
      bool covered = std::any_of(rules.begin(), rules.end(), [](const auto* r) { return !r->object_function; });
      if (!covered) out.insert({d.iri()});
      return;
    }
  }
}

}  // namespace

std::vector<MissingMapping> coverage_check(const RuleSet& rs, const rdf::ClassDescription& d,
                                           const ontology::DomainOntology& ont) {
  std::set<MissingMapping> out;
  collect_missing(rs, d, ont, out);
  return {out.begin(), out.end()};
}

}  // namespace semfed::rules
