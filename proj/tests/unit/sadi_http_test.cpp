#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"
#include "semfed/runtime/sadi_http.hpp"
#include "support/worlds.hpp"

namespace semfed::runtime {
namespace {

using rdf::Term;

const std::string kDom = "http://fixture.local/malaria#";

class SadiHttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    semfed::testing::deploy_world(registry_, semfed::testing::scenario_world_before());
    mount_sadi_routes(server_, registry_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  Registry registry_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(SadiHttpTest, GetReturnsTheDescription) {
  auto res = client().Get("/services/getNameByInsecticideId");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "text/turtle");
  auto g = rdf::parse_turtle(res->body);
  const auto& deployed = registry_.snapshot()->get("getNameByInsecticideId").description;
  EXPECT_EQ(ontology::decode_service(g, Term::iri(deployed.iri)).output, deployed.output);
}

TEST_F(SadiHttpTest, UnknownServiceIs404) {
  auto res = client().Get("/services/getNothingById");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(std::count(res->body.begin(), res->body.end(), '\n'), 1);
  EXPECT_EQ(client().Post("/services/getNothingById", "", "text/turtle")->status, 404);
}

TEST_F(SadiHttpTest, PostDecorates) {
  std::string body = "@prefix dom: <" + kDom + "> .\n<http://fixture.local/id/insecticide/2> a dom:Insecticide .\n";
  auto res = client().Post("/services/getNameByInsecticideId", body, "text/turtle");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  auto g = rdf::parse_turtle(res->body);
  EXPECT_EQ(g.objects(Term::iri("http://fixture.local/id/insecticide/2"), Term::iri(kDom + "has_name")),
            std::vector<Term>{Term::string_literal("Permethrin")});
  EXPECT_FALSE(res->has_header("X-Sadi-Warning"));
}

TEST_F(SadiHttpTest, PostWarnsAboutUntypedNodes) {
  std::string body = "<http://fixture.local/id/insecticide/2> <" + kDom + "has_name> \"x\" .\n";
  auto res = client().Post("/services/getNameByInsecticideId", body, "text/turtle");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(res->has_header("X-Sadi-Warning"));
  EXPECT_EQ(rdf::parse_turtle(res->body).size(), 1u);
}

TEST_F(SadiHttpTest, EmptyAndMalformedBodies) {
  auto empty = client().Post("/services/getNameByInsecticideId", "", "text/turtle");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 200);
  EXPECT_TRUE(rdf::parse_turtle(empty->body).empty());

  auto broken = client().Post("/services/getNameByInsecticideId", "<a> <b", "text/turtle");
  ASSERT_TRUE(broken);
  EXPECT_EQ(broken->status, 400);
  EXPECT_EQ(broken->body.rfind("MalformedInput", 0), 0u);

  auto json = client().Post("/services/getNameByInsecticideId", "{}", "application/json");
  ASSERT_TRUE(json);
  EXPECT_EQ(json->status, 400);
}

TEST_F(SadiHttpTest, InactiveServiceIs409) {
  registry_.transact([](RegistryState& r) {
    r.modify("getNameByInsecticideId", [](forge::ExecutableService& s) {
      s.status = forge::ServiceStatus::Inactive;
      s.inactive_reasons.push_back("An entity is added to the output definition: has_mode_of_action");
    });
  });
  auto res = client().Post("/services/getNameByInsecticideId", "", "text/turtle");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  EXPECT_NE(res->body.find("has_mode_of_action"), std::string::npos);
  auto get = client().Get("/services/getNameByInsecticideId");
  EXPECT_NE(get->body.find("\"inactive\""), std::string::npos);
}

}  // namespace
}  // namespace semfed::runtime
