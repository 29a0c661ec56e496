#include "semfed/rdf/classify.hpp"

#include <algorithm>

#include "semfed/rdf/vocab.hpp"

namespace semfed::rdf {

namespace {

bool holds(const Graph& g, const Term& node, const ClassDescription& d, const OntologyView& ont,
           const Term& rdf_type) {
  using Kind = ClassDescription::Kind;
  switch (d.kind()) {
    case Kind::Named: {
      if (d.is_thing()) return true;
      auto [lo, hi] = g.match(node, rdf_type);
      return std::any_of(lo, hi, [&](const Triple& t) {
        return t.object.is_iri() && ont.is_subclass_of(t.object.value(), d.iri());
      });
    }
    case Kind::IntersectionOf:
      return std::all_of(d.members().begin(), d.members().end(),
                         [&](const ClassDescription& m) { return holds(g, node, m, ont, rdf_type); });
    case Kind::ObjectSomeValuesFrom: {
      auto [lo, hi] = g.match(node, d.property());
      return std::any_of(lo, hi, [&](const Triple& t) {
        return !t.object.is_literal() && holds(g, t.object, d.filler(), ont, rdf_type);
      });
    }
    case Kind::ObjectHasValue:
    case Kind::DataHasValue:
    {
      if (node.is_literal()) return false;
      auto [lo, hi] = g.match(node, d.property());
      return std::any_of(lo, hi, [&](const Triple& t) { return t.object == *d.value(); });
    }
    case Kind::DataSomeValuesFrom: {
      auto [lo, hi] = g.match(node, d.property());
      return std::any_of(lo, hi, [&](const Triple& t) {
        return t.object.is_literal() && t.object.datatype() == d.datatype();
      });
    }
  }
  return false;
}

}  // namespace

void check_properties(const ClassDescription& d, const OntologyView& ont) {
  for (const auto& p : d.properties()) {
    if (!ont.has_property(p)) throw UnknownProperty(p);
  }
}

bool classify(const Graph& g, const Term& node, const ClassDescription& d, const OntologyView& ont) {
  check_properties(d, ont);
  static const Term rdf_type = Term::iri(std::string(vocab::kRdfType));
  return holds(g, node, d, ont, rdf_type);
}

}  // namespace semfed::rdf
