#include "support/classify_oracle.hpp"

#include "semfed/rdf/vocab.hpp"

namespace semfed::testing {

using rdf::ClassDescription;

bool ClassifyOracle::subclass(const std::string& sub, const std::string& super) const {
  if (super == vocab::kOwlThing) return true;
  auto it = superclasses_.find(sub);
  if (it == superclasses_.end()) return sub == super;
  return it->second.count(super) > 0;
}

bool ClassifyOracle::holds(const std::vector<rdf::Triple>& triples, const rdf::Term& node,
                           const ClassDescription& d) const {
  static const std::string type(vocab::kRdfType);
  switch (d.kind()) {
    case ClassDescription::Kind::Named:
      if (d.iri() == vocab::kOwlThing) return true;
      for (const auto& t : triples) {
        if (t.subject == node && t.predicate.value() == type && t.object.is_iri() &&
            subclass(t.object.value(), d.iri())) {
          return true;
        }
      }
      return false;
    case ClassDescription::Kind::IntersectionOf:
      for (const auto& m : d.members()) {
        if (!holds(triples, node, m)) return false;
      }
      return true;
    case ClassDescription::Kind::ObjectSomeValuesFrom:
      for (const auto& t : triples) {
        if (t.subject == node && t.predicate.value() == d.iri() && !t.object.is_literal() &&
            holds(triples, t.object, d.filler())) {
          return true;
        }
      }
      return false;
    case ClassDescription::Kind::ObjectHasValue:
    case ClassDescription::Kind::DataHasValue:
      for (const auto& t : triples) {
        if (t.subject == node && t.predicate.value() == d.iri() && t.object == *d.value()) return true;
      }
      return false;
    case ClassDescription::Kind::DataSomeValuesFrom:
      for (const auto& t : triples) {
        if (t.subject == node && t.predicate.value() == d.iri() && t.object.is_literal() &&
            t.object.datatype() == d.datatype()) {
          return true;
        }
      }
      return false;
  }
  return false;
}

}  // namespace semfed::testing
