#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/rdf/class_description.hpp"
#include "semfed/relational/schema.hpp"

namespace semfed::rules {

class ArityMismatch : public Error {
 public:
  ArityMismatch(std::string predicate, std::size_t expected, std::size_t found)
      : Error("ArityMismatch", predicate + " has " + std::to_string(expected) + " column(s) but the rule binds " +
                                   std::to_string(found)),
        predicate_(std::move(predicate)),
        expected_(expected),
        found_(found) {}
  const std::string& predicate() const noexcept { return predicate_; }
  std::size_t expected() const noexcept { return expected_; }
  std::size_t found() const noexcept { return found_; }

 private:
  std::string predicate_;
  std::size_t expected_;
  std::size_t found_;
};

class UnknownTable : public Error {
 public:
  explicit UnknownTable(std::string name) : Error("UnknownTable", "no table named " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Structurally valid rules that do not fit together (identity function
// without an inverse, conflicting table bindings, ...).
class RuleError : public Error {
 public:
  explicit RuleError(const std::string& message) : Error("RuleError", message) {}
};

// A minting function tied to the primary key of one table, plus the name of
// its declared inverse.
struct IdentityFunction {
  std::string name;
  std::string inverse;
  std::string table;
  std::string key_column;
  friend bool operator==(const IdentityFunction&, const IdentityFunction&) = default;
};

// A `db_<table>(?v1 ... ?vn)` body; variables bind positionally.
struct BodyAtom {
  std::string table;
  std::vector<std::string> variables;
  std::size_t position_of(std::string_view variable) const;
  friend bool operator==(const BodyAtom&, const BodyAtom&) = default;
};

// `Class(f(?v)) :- db_t(...)`
struct MembershipRule {
  std::vector<std::string> quantified;
  std::string class_iri;
  std::string function;
  std::string variable;
  BodyAtom body;
  std::size_t key_position() const { return body.position_of(variable); }
  friend bool operator==(const MembershipRule&, const MembershipRule&) = default;
};

// `p(f(?s) ?v) :- db_t(...)` for data values, `p(f(?s) g(?o)) :- ...` for
// object values.
struct PropertyRule {
  std::vector<std::string> quantified;
  std::string property_iri;
  std::string subject_function;
  std::string subject_variable;
  std::optional<std::string> object_function;
  std::string object_variable;
  BodyAtom body;
  std::size_t subject_position() const { return body.position_of(subject_variable); }
  std::size_t object_position() const { return body.position_of(object_variable); }
  friend bool operator==(const PropertyRule&, const PropertyRule&) = default;
};

class RuleSet {
 public:
  const std::map<std::string, std::string>& prefixes() const noexcept { return prefixes_; }
  const std::map<std::string, IdentityFunction>& identity_functions() const noexcept { return functions_; }
  const std::vector<MembershipRule>& membership_rules() const noexcept { return membership_; }
  const std::vector<PropertyRule>& property_rules() const noexcept { return properties_; }
  // `db_<table>` -> arity
  const std::map<std::string, std::size_t>& arities() const noexcept { return arities_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  const IdentityFunction* function(std::string_view name) const;
  std::vector<const MembershipRule*> rules_for_class(std::string_view class_iri) const;
  std::vector<const PropertyRule*> rules_for_property(std::string_view property_iri) const;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

 private:
  friend RuleSet parse_rules(std::string_view text, const relational::RelationalSchema& schema);

  std::map<std::string, std::string> prefixes_;
  std::map<std::string, IdentityFunction> functions_;
  std::vector<MembershipRule> membership_;
  std::vector<PropertyRule> properties_;
  std::map<std::string, std::size_t> arities_;
  std::vector<std::string> warnings_;
};

// Parses the rule language: `Prefix(name: <iri>)` declarations, `Group ( ... )`
// blocks (grouping only), and `Forall ?v... ( ... )` items that are either
// identity/inverse equations `inv(f(?x)) = ?x` or Horn rules with a single
// `db_<table>` body atom. `%` starts a line comment.
//
// Throws SyntaxError, ArityMismatch, UnknownTable or RuleError.
RuleSet parse_rules(std::string_view text, const relational::RelationalSchema& schema);

// Renders `rs` so that parse_rules gives back an equal RuleSet.
std::string serialize_rules(const RuleSet& rs);

struct MissingMapping {
  std::string iri;
  friend auto operator<=>(const MissingMapping&, const MissingMapping&) = default;
};

// One entry per class or property used in `d` that no rule can populate.
// A class counts as covered when some membership rule targets it or one of
// its subclasses. Entries are sorted and unique.
std::vector<MissingMapping> coverage_check(const RuleSet& rs, const rdf::ClassDescription& d,
                                           const ontology::DomainOntology& ont);

}  // namespace semfed::rules
