#include "semfed/ontology/inventory.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include "semfed/rdf/vocab.hpp"

namespace semfed::ontology {

using rdf::ClassDescription;

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Class: return "class";
    case EntityKind::ObjectProperty: return "object-property";
    case EntityKind::DataProperty: return "data-property";
    case EntityKind::DatatypeUse: return "datatype-use";
    case EntityKind::Service: return "service";
    case EntityKind::Table: return "table";
    case EntityKind::Column: return "column";
  }
  return "unknown";
}

std::string InventoryEntry::display() const {
  if (iri.rfind(vocab::kXsd, 0) == 0) return "xsd:" + iri.substr(vocab::kXsd.size());
  if (kind == EntityKind::Table || kind == EntityKind::Column) return iri;
  return std::string(rdf::local_name(iri));
}

void EntityInventory::add(InventoryEntry e) {
  Key key{e.kind, e.iri, e.scope};
  entries_.insert_or_assign(std::move(key), std::move(e));
}

const InventoryEntry* EntityInventory::find(const Key& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string fingerprint(std::vector<std::string> axioms) {
  std::sort(axioms.begin(), axioms.end());
  axioms.erase(std::unique(axioms.begin(), axioms.end()), axioms.end());
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& a : axioms) {
    for (unsigned char c : a) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;  // axiom separator
    h *= 1099511628211ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

ClassDescription rename_iri(const ClassDescription& d, const std::string& from, const std::string& to) {
  using Kind = ClassDescription::Kind;
  auto swap = [&](const std::string& iri) { return iri == from ? to : iri; };
  switch (d.kind()) {
    case Kind::Named:
      return ClassDescription::named(swap(d.iri()));
    case Kind::IntersectionOf: {
      std::vector<ClassDescription> members;
      for (const auto& m : d.members()) members.push_back(rename_iri(m, from, to));
      return ClassDescription::intersection_of(std::move(members));
    }
    case Kind::ObjectSomeValuesFrom:
      return ClassDescription::object_some_values_from(swap(d.iri()), rename_iri(d.filler(), from, to));
    case Kind::ObjectHasValue: {
      const rdf::Term& v = *d.value();
      rdf::Term value = v.is_iri() && v.value() == from ? rdf::Term::iri(to) : v;
      return ClassDescription::object_has_value(swap(d.iri()), std::move(value));
    }
    case Kind::DataSomeValuesFrom:
      return ClassDescription::data_some_values_from(swap(d.iri()), swap(d.datatype()));
    case Kind::DataHasValue: {
      const rdf::Term& v = *d.value();
      return ClassDescription::data_has_value(swap(d.iri()), rdf::Term::literal(v.value(), swap(v.datatype())));
    }
  }
  return d;
}

EntityInventory inventory(const DomainOntology& o) {
  const std::string self(kSelfPlaceholder);
  auto own = [&](const std::string& iri, const std::string& entity) { return iri == entity ? self : iri; };

  std::map<std::string, std::vector<std::string>> class_axioms;
  for (const auto& [iri, decl] : o.classes()) {
    auto& axioms = class_axioms[iri];
    axioms.push_back("label " + decl.label);
    for (const auto& super : decl.superclasses) axioms.push_back("subClassOf " + own(super, iri));
  }
  for (const auto& [iri, decl] : o.classes()) {
    for (const auto& super : decl.superclasses) {
      if (auto it = class_axioms.find(super); it != class_axioms.end()) {
        it->second.push_back("superClassOf " + own(iri, super));
      }
    }
  }
  for (const auto& [individual, cls] : o.individuals()) {
    if (auto it = class_axioms.find(cls); it != class_axioms.end()) it->second.push_back("instance " + individual);
  }

  EntityInventory inv;
  for (auto& [iri, axioms] : class_axioms) {
    inv.add({iri, EntityKind::Class, "", fingerprint(std::move(axioms))});
  }
  for (const auto& [iri, decl] : o.object_properties()) {
    inv.add({iri, EntityKind::ObjectProperty, "", fingerprint({"label " + decl.label})});
  }
  for (const auto& [iri, decl] : o.data_properties()) {
    inv.add({iri, EntityKind::DataProperty, "", fingerprint({"label " + decl.label, "range " + decl.range})});
  }
  return inv;
}

namespace {

// Walks a description collecting properties by kind and datatype uses.
void collect(const ClassDescription& d, std::set<std::pair<std::string, EntityKind>>& properties,
             std::set<std::pair<std::string, std::string>>& datatype_uses) {
  using Kind = ClassDescription::Kind;
  switch (d.kind()) {
    case Kind::ObjectSomeValuesFrom:
    case Kind::ObjectHasValue:
      properties.emplace(d.iri(), EntityKind::ObjectProperty);
      break;
    case Kind::DataSomeValuesFrom:
      properties.emplace(d.iri(), EntityKind::DataProperty);
      datatype_uses.emplace(d.datatype(), d.iri());
      break;
    case Kind::DataHasValue:
      properties.emplace(d.iri(), EntityKind::DataProperty);
      datatype_uses.emplace(d.value()->datatype(), d.iri());
      break;
    default:
      break;
  }
  for (const auto& m : d.members()) collect(m, properties, datatype_uses);
}

}  // namespace

EntityInventory inventory(const ServiceOntology& s) {
  const std::string self(kSelfPlaceholder);
  std::map<std::pair<std::string, EntityKind>, std::vector<std::string>> usages;
  EntityInventory inv;

  for (const auto& [name, svc] : s.entries()) {
    inv.add({svc.iri, EntityKind::Service, "",
             fingerprint({"input " + svc.input.canonical(), "output " + svc.output.canonical(),
                          "comment " + svc.description})});
    for (const auto& [position, desc] : {std::pair{"input", &svc.input}, std::pair{"output", &svc.output}}) {
      std::set<std::pair<std::string, EntityKind>> properties;
      std::set<std::pair<std::string, std::string>> datatype_uses;
      collect(*desc, properties, datatype_uses);
      for (const auto& cls : desc->named_classes()) {
        if (cls == vocab::kOwlThing) continue;
        usages[{cls, EntityKind::Class}].push_back(name + " " + position + " " +
                                                   rename_iri(*desc, cls, self).canonical());
      }
      for (const auto& [iri, kind] : properties) {
        usages[{iri, kind}].push_back(name + " " + position + " " + rename_iri(*desc, iri, self).canonical());
      }
      for (const auto& [datatype, property] : datatype_uses) {
        std::string scope = name + " " + property;
        inv.add({datatype, EntityKind::DatatypeUse, scope, fingerprint({std::string(position) + " " + scope})});
      }
    }
  }
  for (auto& [key, axioms] : usages) {
    inv.add({key.first, key.second, "", fingerprint(std::move(axioms))});
  }
  return inv;
}

}  // namespace semfed::ontology
