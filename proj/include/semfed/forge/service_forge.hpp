#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semfed/error.hpp"
#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"
#include "semfed/rdf/graph.hpp"
#include "semfed/relational/database.hpp"
#include "semfed/relational/plan.hpp"
#include "semfed/rules/rule_set.hpp"

namespace semfed::forge {

inline constexpr std::string_view kDefaultInstanceBase = "http://fixture.local/id/";

class ParseFailure : public Error {
 public:
  explicit ParseFailure(std::string iri)
      : Error("ParseFailure", "IRI was not minted by this identity function: " + iri), iri_(std::move(iri)) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

// The rules cannot populate some class or property the service needs.
class MissingMappingError : public Error {
 public:
  explicit MissingMappingError(std::vector<std::string> iris);
  const std::vector<std::string>& iris() const noexcept { return iris_; }

 private:
  std::vector<std::string> iris_;
};

// Several rules could populate the same term for one service.
class AmbiguousMapping : public Error {
 public:
  explicit AmbiguousMapping(std::string iri)
      : Error("AmbiguousMapping", "more than one rule populates " + iri), iri_(std::move(iri)) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

// A data restriction whose datatype cannot hold the mapped column's values.
class MappingTypeError : public Error {
 public:
  MappingTypeError(const std::string& property, const std::string& datatype, const std::string& column)
      : Error("MappingTypeError", "column " + column + " cannot supply " + datatype + " values for " + property) {}
};

// `<base><table>/<key>`; key must be non-negative.
rdf::Term mint_iri(const rules::IdentityFunction& f, std::int64_t key,
                   std::string_view base = kDefaultInstanceBase);
// Inverse of mint_iri. Rejects foreign IRIs, signs and leading zeros.
std::int64_t parse_iri(const rules::IdentityFunction& f, std::string_view iri,
                       std::string_view base = kDefaultInstanceBase);

// How one row of a plan part becomes a triple about the subject.
struct Emitter {
  enum class Kind {
    Literal,  // (s property value^^datatype)
    Object,   // (s property f(value)), plus (f(value) rdf:type class) when set
    Type,     // (s rdf:type class)
  };
  Kind kind = Kind::Literal;
  std::string property;
  std::size_t column = 0;
  std::string datatype;
  std::optional<rules::IdentityFunction> object_function;
  std::optional<std::string> class_iri;
  friend bool operator==(const Emitter&, const Emitter&) = default;
};

// One query plan plus the emitters reading its rows. Data restrictions
// that share a source table share a part; each object restriction gets its
// own part so that its join stays independent. Parts of allX services take
// no parameter and mint the subject from `subject_column`; all other parts
// select on the input instance's key as parameter 0.
struct PlanPart {
  relational::QueryPlan plan;
  std::optional<std::size_t> subject_column;
  std::vector<Emitter> emitters;
  friend bool operator==(const PlanPart&, const PlanPart&) = default;
};

enum class ServiceStatus { Active, Inactive };

struct ExecutableService {
  ontology::ServiceDescription description;
  // Mints and parses the instances this service is about. For allX services
  // it mints the enumerated instances.
  rules::IdentityFunction subject_function;
  std::vector<PlanPart> parts;
  std::string instance_base = std::string(kDefaultInstanceBase);

  ServiceStatus status = ServiceStatus::Active;
  std::vector<std::string> inactive_reasons;
  std::string time_of_creation;
  std::optional<std::string> time_of_rebuild;

  bool active() const noexcept { return status == ServiceStatus::Active; }
  // Plans of all parts, joined with "; ".
  std::string plan_text() const;
};

// Unfolds the output description of `d` through `rs` into plans over
// `schema`. Coverage gaps are reported before validation against `ont`, so
// a stale rule set always surfaces as MissingMappingError.
//
// Throws MissingMappingError, AmbiguousMapping, MappingTypeError,
// InvalidServiceDescription, or the validation errors of the ontology.
ExecutableService synthesize(const ontology::ServiceDescription& d, const rules::RuleSet& rs,
                             const relational::RelationalSchema& schema, const ontology::DomainOntology& ont,
                             std::string_view instance_base = kDefaultInstanceBase);

// Triples the service adds for one input instance (ignored for allX, which
// enumerates its whole table). Throws ParseFailure when `instance` was not
// minted by the service's subject function.
std::vector<rdf::Triple> decorate(const ExecutableService& s, const relational::Database& db,
                                  const rdf::Term& instance);

}  // namespace semfed::forge
