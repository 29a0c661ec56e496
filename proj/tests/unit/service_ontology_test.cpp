#include <gtest/gtest.h>

#include "semfed/ontology/service_ontology.hpp"
#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"
#include "support/fixture.hpp"

namespace semfed::ontology {
namespace {

using rdf::ClassDescription;
const std::string kDom = "http://fixture.local/malaria#";
const std::string kSvc = "http://localhost:9999/sadi-services/";

ClassDescription str_restriction(const std::string& p) {
  return ClassDescription::data_some_values_from(kDom + p, std::string(vocab::kXsdString));
}

TEST(ServiceOntologyTest, LoadsFourFixtureServices) {
  auto s = load_service_ontology(semfed::testing::read_fixture("malaria/svc-v1.ttl"), "v1");
  ASSERT_EQ(s.entries().size(), 4u);
  const auto* d = s.find("getNameByInsecticideId");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->iri, kSvc + "getNameByInsecticideId");
  EXPECT_EQ(d->description, "Retrieves the name of an insecticide");
  EXPECT_EQ(d->input, ClassDescription::named(kDom + "Insecticide"));
  EXPECT_EQ(d->output, ClassDescription::intersection_of({ClassDescription::named(kDom + "Insecticide"), str_restriction("has_name")}));
  EXPECT_EQ(d->new_conjuncts(), std::vector<ClassDescription>{str_restriction("has_name")});

  const auto* all = s.find("allPublicHealthActivities");
  ASSERT_NE(all, nullptr);
  EXPECT_TRUE(all->is_all());
  EXPECT_TRUE(all->input.is_thing());
  EXPECT_EQ(all->output.conjuncts().size(), 2u);

  const auto* ins = s.find("getInsecticideIdByIndoorResidualSprayingId");
  ASSERT_NE(ins, nullptr);
  EXPECT_EQ(ins->new_conjuncts(),
            std::vector<ClassDescription>{ClassDescription::object_some_values_from(
                kDom + "has_insecticide", ClassDescription::named(kDom + "Insecticide"))});
}

TEST(ServiceOntologyTest, VersionTwoAddsModeOfAction) {
  auto s = load_service_ontology(semfed::testing::read_fixture("malaria/svc-v2.ttl"), "v2");
  const auto* d = s.find("getNameByInsecticideId");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->output, ClassDescription::intersection_of({ClassDescription::named(kDom + "Insecticide"),
                                                          str_restriction("has_name"), str_restriction("has_mode_of_action")}));
}

TEST(ServiceOntologyTest, EncodeDecodeRoundTrip) {
  auto s = load_service_ontology(semfed::testing::read_fixture("malaria-q2/svc.ttl"));
  rdf::Graph g(service_prefixes());
  for (const auto& [name, d] : s.entries()) encode_service(g, d);
  auto reloaded = load_service_ontology(rdf::serialize_turtle(g));
  EXPECT_EQ(reloaded.entries(), s.entries());
}

TEST(ServiceOntologyTest, ShapeChecks) {
  ServiceDescription d;
  d.name = "fetchThings";
  d.iri = kSvc + d.name;
  EXPECT_THROW(check_service_shape(d), InvalidServiceDescription);

  d.name = "getNameByInsecticideId";
  d.input = ClassDescription::named(kDom + "Insecticide");
  d.output = ClassDescription::named(kDom + "Insecticide");
  EXPECT_THROW(check_service_shape(d), InvalidServiceDescription);  // decorates nothing

  d.output = ClassDescription::intersection_of({ClassDescription::named(kDom + "Other"), str_restriction("has_name")});
  EXPECT_THROW(check_service_shape(d), InvalidServiceDescription);  // drops the input class

  d.output = ClassDescription::intersection_of({ClassDescription::named(kDom + "Insecticide"), str_restriction("has_name")});
  EXPECT_NO_THROW(check_service_shape(d));

  ServiceDescription all;
  all.name = "allInsecticides";
  all.input = ClassDescription::named(kDom + "Insecticide");
  all.output = ClassDescription::named(kDom + "Insecticide");
  EXPECT_THROW(check_service_shape(all), InvalidServiceDescription);
  all.input = ClassDescription::thing();
  EXPECT_NO_THROW(check_service_shape(all));
  all.output = str_restriction("has_name");
  EXPECT_THROW(check_service_shape(all), InvalidServiceDescription);
}

TEST(ServiceOntologyTest, DuplicateNamesRejected) {
  ServiceDescription all;
  all.name = "allInsecticides";
  all.output = ClassDescription::named(kDom + "Insecticide");
  EXPECT_THROW(ServiceOntology("v", {all, all}), InvalidServiceDescription);
}

TEST(ServiceOntologyTest, ValidateAgainstDomain) {
  auto v1 = load_ontology(semfed::testing::read_fixture("malaria/domain-v1.ttl"));
  auto v2 = load_ontology(semfed::testing::read_fixture("malaria/domain-v2.ttl"));
  auto svc2 = load_service_ontology(semfed::testing::read_fixture("malaria/svc-v2.ttl"));
  EXPECT_THROW(validate(svc2, v1), rdf::UnknownProperty);
  EXPECT_NO_THROW(validate(svc2, v2));
}

}  // namespace
}  // namespace semfed::ontology
