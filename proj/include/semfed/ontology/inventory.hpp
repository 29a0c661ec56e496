#pragma once

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "semfed/ontology/domain_ontology.hpp"
#include "semfed/ontology/service_ontology.hpp"

namespace semfed::ontology {

enum class EntityKind {
  Class,
  ObjectProperty,
  DataProperty,
  DatatypeUse,
  Service,
  Table,
  Column,
};

std::string_view to_string(EntityKind kind);

// One diffable entity. `scope` disambiguates datatype uses (service and
// restriction property) and is empty for everything else.
struct InventoryEntry {
  std::string iri;
  EntityKind kind = EntityKind::Class;
  std::string scope;
  std::string fingerprint;

  auto key() const { return std::tie(kind, iri, scope); }
  // Short name as shown in change reports: `xsd:string`, `has_name`, ...
  std::string display() const;

  friend bool operator==(const InventoryEntry&, const InventoryEntry&) = default;
};

class EntityInventory {
 public:
  using Key = std::tuple<EntityKind, std::string, std::string>;

  // Replaces any entry with the same key.
  void add(InventoryEntry e);
  bool contains(const Key& key) const { return entries_.count(key) > 0; }
  const InventoryEntry* find(const Key& key) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const EntityInventory&, const EntityInventory&) = default;

 private:
  std::map<Key, InventoryEntry> entries_;
};

// Stable 64-bit FNV-1a over the sorted axiom strings, hex encoded.
std::string fingerprint(std::vector<std::string> axioms);

// Placeholder substituted for an entity's own IRI inside its fingerprint.
inline constexpr std::string_view kSelfPlaceholder = "urn:semfed:self";

// `d` with every occurrence of `from` (class, property or IRI value)
// replaced by `to`, re-normalised.
rdf::ClassDescription rename_iri(const rdf::ClassDescription& d, const std::string& from, const std::string& to);

EntityInventory inventory(const DomainOntology& o);
EntityInventory inventory(const ServiceOntology& s);

}  // namespace semfed::ontology
