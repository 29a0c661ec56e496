#pragma once

#include <string_view>

// Well-known IRIs used across the engine.
namespace semfed::vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kRdfsComment = "http://www.w3.org/2000/01/rdf-schema#comment";
inline constexpr std::string_view kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";

inline constexpr std::string_view kOwlThing = "http://www.w3.org/2002/07/owl#Thing";
inline constexpr std::string_view kOwlClass = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view kOwlObjectProperty = "http://www.w3.org/2002/07/owl#ObjectProperty";
inline constexpr std::string_view kOwlDatatypeProperty = "http://www.w3.org/2002/07/owl#DatatypeProperty";
inline constexpr std::string_view kOwlEquivalentClass = "http://www.w3.org/2002/07/owl#equivalentClass";
inline constexpr std::string_view kOwlIntersectionOf = "http://www.w3.org/2002/07/owl#intersectionOf";
inline constexpr std::string_view kOwlOnProperty = "http://www.w3.org/2002/07/owl#onProperty";
inline constexpr std::string_view kOwlSomeValuesFrom = "http://www.w3.org/2002/07/owl#someValuesFrom";
inline constexpr std::string_view kOwlHasValue = "http://www.w3.org/2002/07/owl#hasValue";

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdGYear = "http://www.w3.org/2001/XMLSchema#gYear";

// Service-ontology vocabulary of this engine.
inline constexpr std::string_view kServ = "http://semfed.local/ns/service#";
inline constexpr std::string_view kServService = "http://semfed.local/ns/service#Service";
inline constexpr std::string_view kServInputClass = "http://semfed.local/ns/service#inputClass";
inline constexpr std::string_view kServOutputClass = "http://semfed.local/ns/service#outputClass";
inline constexpr std::string_view kServStatus = "http://semfed.local/ns/service#status";
inline constexpr std::string_view kServInactiveReason = "http://semfed.local/ns/service#inactiveReason";
inline constexpr std::string_view kServTimeOfCreation = "http://semfed.local/ns/service#timeOfCreation";
inline constexpr std::string_view kServTimeOfRebuild = "http://semfed.local/ns/service#timeOfRebuild";

inline bool is_supported_datatype(std::string_view iri) {
  return iri == kXsdString || iri == kXsdInteger || iri == kXsdGYear;
}

}  // namespace semfed::vocab
