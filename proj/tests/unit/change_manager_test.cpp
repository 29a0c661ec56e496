#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include <json.hpp>

#include "semfed/change/change_manager.hpp"
#include "semfed/query/engine.hpp"
#include "semfed/rdf/vocab.hpp"
#include "support/cq_oracle.hpp"
#include "support/fixture.hpp"
#include "support/random_ontology.hpp"
#include "support/rule_oracle.hpp"
#include "support/worlds.hpp"

namespace semfed::change {
namespace {

using ontology::EntityKind;
using ontology::InventoryEntry;
using rdf::Term;
using semfed::testing::read_fixture;
using semfed::testing::World;

const std::string kDom = "http://fixture.local/malaria#";
const std::string kId = "http://fixture.local/id/";
const std::string kQ1 = "Which indoor residual sprayings used permethrin as an insecticide?";
const std::string kQ1Extended =
    "Which indoor residual spraying used permethrin as an insecticide and which kind of mosquitoes will be "
    "affected by it?";

query::GraphQuery named_query(const std::string& file, const std::string& name) {
  auto q = query::parse_query(read_fixture(file));
  q.name = name;
  return q;
}

Sources to_sources(const World& w) {
  return {w.schema, std::make_shared<const relational::Database>(w.db), w.rules, w.domain, w.services};
}

ontology::ServiceOntology services(const std::string& file) {
  return ontology::load_service_ontology(read_fixture(file));
}

// Every inactive service carries at least one reason, and every reason that
// names an event names a logged event listing the service.
void expect_traceable(const runtime::RegistryState& r, const ChangeLog& log) {
  for (const auto& [name, s] : r.services) {
    if (s->active()) continue;
    EXPECT_FALSE(s->inactive_reasons.empty()) << name;
    for (const auto& reason : s->inactive_reasons) {
      auto id = event_of_reason(reason);
      if (!id) continue;
      const auto* e = log.find(*id);
      ASSERT_NE(e, nullptr) << reason;
      EXPECT_NE(std::find(e->affected_services.begin(), e->affected_services.end(), name),
                e->affected_services.end())
          << reason;
    }
  }
}

void expect_safe(ChangeManager& cm) {
  auto r = cm.registry().snapshot();
  EXPECT_EQ(lifecycle_violations(*r, cm.sources().services, cm.sources().rules), std::vector<std::string>{});
  expect_traceable(*r, cm.log());
}

// ---------------------------------------------------------------------------
// Diff

std::vector<Change> inverse(std::vector<Change> changes) {
  for (auto& c : changes) {
    if (c.kind == ChangeKind::Added) {
      c.kind = ChangeKind::Deleted;
    } else if (c.kind == ChangeKind::Deleted) {
      c.kind = ChangeKind::Added;
    } else {
      std::swap(c.entry, *c.from);
    }
  }
  std::sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) {
    return std::tie(a.entry.kind, a.entry.iri, a.entry.scope, a.kind) <
           std::tie(b.entry.kind, b.entry.iri, b.entry.scope, b.kind);
  });
  return changes;
}

TEST(DiffTest, ServiceOntologyChangeIsTwoAdditions) {
  auto v1 = ontology::inventory(services("malaria/svc-v1.ttl"));
  auto v2 = ontology::inventory(services("malaria/svc-v2.ttl"));
  auto d = diff(v1, v2);
  ASSERT_EQ(d.changes.size(), 2u);
  EXPECT_EQ(d.changes[0].kind, ChangeKind::Added);
  EXPECT_EQ(d.changes[0].entry.kind, EntityKind::DataProperty);
  EXPECT_EQ(d.changes[0].entry.display(), "has_mode_of_action");
  EXPECT_EQ(d.changes[1].kind, ChangeKind::Added);
  EXPECT_EQ(d.changes[1].entry.kind, EntityKind::DatatypeUse);
  EXPECT_EQ(d.changes[1].entry.display(), "xsd:string");
  EXPECT_TRUE(d.notices.empty());
  EXPECT_EQ(diff(v2, v1).changes, inverse(d.changes));
}

TEST(DiffTest, IdenticalInventoriesHaveNoChanges) {
  for (const auto& file : {"malaria/svc-v1.ttl", "malaria/svc-v2.ttl", "malaria-q2/svc.ttl"}) {
    auto inv = ontology::inventory(services(file));
    EXPECT_TRUE(diff(inv, inv).changes.empty()) << file;
  }
  auto dom = ontology::inventory(ontology::load_ontology(read_fixture("malaria/domain-v2.ttl")));
  EXPECT_TRUE(diff(dom, dom).changes.empty());
}

TEST(DiffTest, DomainVersionsOnlyAdd) {
  auto d = diff(ontology::inventory(ontology::load_ontology(read_fixture("malaria/domain-v1.ttl"))),
                ontology::inventory(ontology::load_ontology(read_fixture("malaria/domain-v2.ttl"))));
  ASSERT_FALSE(d.changes.empty());
  for (const auto& c : d.changes) EXPECT_EQ(c.kind, ChangeKind::Added) << c.entry.iri;
  EXPECT_TRUE(std::any_of(d.changes.begin(), d.changes.end(),
                          [](const Change& c) { return c.entry.iri == kDom + "has_mode_of_action"; }));
}

TEST(DiffTest, AmbiguousRenameBecomesNotice) {
  ontology::EntityInventory a;
  ontology::EntityInventory b;
  a.add({"x", EntityKind::Class, "", "f1"});
  b.add({"y", EntityKind::Class, "", "f1"});
  b.add({"z", EntityKind::Class, "", "f1"});
  auto d = diff(a, b);
  ASSERT_EQ(d.changes.size(), 3u);
  EXPECT_TRUE(std::none_of(d.changes.begin(), d.changes.end(),
                           [](const Change& c) { return c.kind == ChangeKind::Renamed; }));
  EXPECT_EQ(d.notices.size(), 1u);

  ontology::EntityInventory c;
  c.add({"y", EntityKind::Class, "", "f1"});
  auto r = diff(a, c);
  ASSERT_EQ(r.changes.size(), 1u);
  EXPECT_EQ(r.changes[0].kind, ChangeKind::Renamed);
  EXPECT_EQ(r.changes[0].from->iri, "x");
  EXPECT_EQ(r.changes[0].entry.iri, "y");
}

TEST(DiffTest, KindsNeverPairAcrossRenames) {
  ontology::EntityInventory a;
  ontology::EntityInventory b;
  a.add({"x", EntityKind::ObjectProperty, "", "f"});
  b.add({"y", EntityKind::DataProperty, "", "f"});
  auto d = diff(a, b);
  ASSERT_EQ(d.changes.size(), 2u);
  EXPECT_EQ(d.changes[0].kind, ChangeKind::Deleted);
  EXPECT_EQ(d.changes[1].kind, ChangeKind::Added);
}

// Each key on one side only is reported exactly once, renames pair
// entries of one kind and fingerprint that are alone in their group, and
// swapping the arguments inverts the result.
void expect_diff_algebra(const ontology::EntityInventory& a, const ontology::EntityInventory& b) {
  auto d = diff(a, b);
  std::multiset<ontology::EntityInventory::Key> deleted;
  std::multiset<ontology::EntityInventory::Key> added;
  std::map<std::pair<EntityKind, std::string>, int> group;
  for (const auto& [key, e] : a) {
    if (!b.contains(key)) ++group[{e.kind, e.fingerprint}];
  }
  for (const auto& [key, e] : b) {
    if (!a.contains(key)) ++group[{e.kind, e.fingerprint}];
  }
  for (const auto& c : d.changes) {
    switch (c.kind) {
      case ChangeKind::Added: added.insert(c.entry.key()); break;
      case ChangeKind::Deleted: deleted.insert(c.entry.key()); break;
      case ChangeKind::Renamed:
        ASSERT_TRUE(c.from.has_value());
        added.insert(c.entry.key());
        deleted.insert(c.from->key());
        EXPECT_EQ(c.entry.kind, c.from->kind);
        EXPECT_EQ(c.entry.fingerprint, c.from->fingerprint);
        EXPECT_EQ((group[{c.entry.kind, c.entry.fingerprint}]), 2);
        break;
    }
  }
  std::multiset<ontology::EntityInventory::Key> want_deleted;
  std::multiset<ontology::EntityInventory::Key> want_added;
  for (const auto& [key, e] : a) {
    if (!b.contains(key)) want_deleted.insert(key);
  }
  for (const auto& [key, e] : b) {
    if (!a.contains(key)) want_added.insert(key);
  }
  EXPECT_EQ(deleted, want_deleted);
  EXPECT_EQ(added, want_added);
  EXPECT_EQ(diff(b, a).changes, inverse(d.changes));
  EXPECT_TRUE(diff(a, a).changes.empty());
}

TEST(DiffPropertyTest, RandomEditsKeepTheAlgebra) {
  std::mt19937_64 rng(20180121);
  for (int i = 0; i < 200; ++i) {
    auto before = semfed::testing::random_domain_ontology(rng);
    auto edited = semfed::testing::random_edits(rng, before);
    auto a = ontology::inventory(before);
    auto b = ontology::inventory(edited.after);
    SCOPED_TRACE("pair " + std::to_string(i));
    expect_diff_algebra(a, b);

    // A constructed rename whose entity kept its definition and met no
    // look-alike is reported as exactly that rename.
    auto d = diff(a, b);
    for (const auto& [from, to] : edited.renames) {
      auto find = [](const ontology::EntityInventory& inv, const std::string& iri) -> const InventoryEntry* {
        for (const auto& [key, e] : inv) {
          if (e.iri == iri) return &e;
        }
        return nullptr;
      };
      const auto* old_entry = find(a, from);
      const auto* new_entry = find(b, to);
      if (old_entry == nullptr || new_entry == nullptr || old_entry->fingerprint != new_entry->fingerprint) continue;
      int peers = 0;
      for (const auto& [key, e] : a) peers += !b.contains(key) && e.kind == old_entry->kind && e.fingerprint == old_entry->fingerprint;
      for (const auto& [key, e] : b) peers += !a.contains(key) && e.kind == new_entry->kind && e.fingerprint == new_entry->fingerprint;
      if (peers != 2) continue;
      Change want{ChangeKind::Renamed, *new_entry, *old_entry};
      EXPECT_NE(std::find(d.changes.begin(), d.changes.end(), want), d.changes.end()) << from << " -> " << to;
    }
  }
}

TEST(DiffPropertyTest, SingleRenameIsReportedExactly) {
  std::mt19937_64 rng(20180123);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto before = semfed::testing::random_domain_ontology(rng);
    auto edited = semfed::testing::single_rename(rng, before);
    if (edited.renames.empty()) continue;
    ++checked;
    auto d = diff(ontology::inventory(before), ontology::inventory(edited.after));
    ASSERT_EQ(d.changes.size(), 1u) << "pair " << i;
    EXPECT_EQ(d.changes[0].kind, ChangeKind::Renamed);
    EXPECT_EQ(d.changes[0].from->iri, edited.renames[0].first);
    EXPECT_EQ(d.changes[0].entry.iri, edited.renames[0].second);
    EXPECT_TRUE(d.notices.empty());
  }
  EXPECT_EQ(checked, 200);
}

TEST(DiffTest, RenameWithLookAlikeIsNotGuessed) {
  std::mt19937_64 rng(7);
  auto before = semfed::testing::random_domain_ontology(rng);
  ontology::DataPropertyDecl p{"http://rand.local/o#solo", "alpha", std::string(vocab::kXsdString)};
  auto data = before.data_properties();
  data.emplace(p.iri, p);
  ontology::DomainOntology a(before.version(), before.classes(), before.object_properties(), data,
                             before.individuals());
  auto renamed = semfed::testing::rename_entity(a, p.iri, "http://rand.local/o#solo2");
  auto twin_data = renamed.data_properties();
  twin_data.emplace("http://rand.local/o#solo3", ontology::DataPropertyDecl{"http://rand.local/o#solo3", "alpha",
                                                                           std::string(vocab::kXsdString)});
  ontology::DomainOntology b(before.version(), renamed.classes(), renamed.object_properties(), twin_data,
                             renamed.individuals());
  auto d = diff(ontology::inventory(a), ontology::inventory(b));
  EXPECT_EQ(d.changes.size(), 3u);
  EXPECT_EQ(d.notices.size(), 1u);
  EXPECT_TRUE(std::none_of(d.changes.begin(), d.changes.end(),
                           [](const Change& c) { return c.kind == ChangeKind::Renamed; }));
}

TEST(SchemaDiffTest, VersionTwoAddsOneColumn) {
  auto v1 = relational::parse_schema(read_fixture("malaria/schema-v1.txt"));
  auto v2 = relational::parse_schema(read_fixture("malaria/schema-v2.txt"));
  auto d = diff(inventory(v1), inventory(v2));
  ASSERT_EQ(d.changes.size(), 1u);
  EXPECT_EQ(d.changes[0].kind, ChangeKind::Added);
  EXPECT_EQ(d.changes[0].entry.kind, EntityKind::Column);
  EXPECT_EQ(d.changes[0].entry.iri, "insecticide.mode.of.action");
}

TEST(SchemaDiffTest, ColumnRenameIsInferred) {
  auto v1 = relational::parse_schema(read_fixture("malaria/schema-v1.txt"));
  auto renamed = relational::parse_schema(
      "table geographicregion(id int pk, name text)\n"
      "table insecticide(id int pk, name text)\n"
      "table spraying(id int pk, name text, location.id int fk geographicregion.id, yr int, "
      "insecticide.id int fk insecticide.id)\n");
  auto d = diff(inventory(v1), inventory(renamed));
  ASSERT_EQ(d.changes.size(), 1u);
  EXPECT_EQ(d.changes[0].kind, ChangeKind::Renamed);
  EXPECT_EQ(d.changes[0].from->iri, "spraying.year");
  EXPECT_EQ(d.changes[0].entry.iri, "spraying.yr");
}

// ---------------------------------------------------------------------------
// Events, log, impact

TEST(ChangeEventTest, JsonLineRoundTrip) {
  ChangeEvent e;
  e.timestamp = "2018-01-21T14:33:08";
  e.description = "An entity is renamed in the domain ontology";
  e.entity_renamed = std::pair{std::string("has_label"), std::string("has_name")};
  e.affected_services = {"a", "b"};
  e.affected_queries = {kQ1};
  auto line = to_json_line(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["description_of_change"], e.description);
  EXPECT_TRUE(j["entity_added"].is_null());
  EXPECT_EQ(j["entity_renamed"]["from"], "has_label");
  EXPECT_EQ(j["affected_service"].size(), 2u);
  EXPECT_EQ(from_json_line(line), e);

  ChangeEvent added;
  added.timestamp = e.timestamp;
  added.description = "An entity is added to the output definition";
  added.entity_added = "xsd:string";
  EXPECT_EQ(from_json_line(to_json_line(added)), added);
  EXPECT_EQ(added.entity(), "xsd:string");
  EXPECT_EQ(e.entity(), "has_name");
}

TEST(ChangeLogTest, AssignsIdsAndRejectsTimeTravel) {
  ChangeLog log;
  std::vector<ChangeEvent> batch(2);
  batch[0].timestamp = "2018-01-21T14:33:08";
  batch[1].timestamp = "2018-01-21T14:33:08";
  log.append(batch);
  EXPECT_EQ(batch[1].id, 2u);
  ASSERT_NE(log.find(2), nullptr);
  EXPECT_EQ(log.find(3), nullptr);

  std::vector<ChangeEvent> earlier(1);
  earlier[0].timestamp = "2018-01-20T00:00:00";
  EXPECT_THROW(log.append(earlier), ClockError);
  std::vector<ChangeEvent> malformed(1);
  malformed[0].timestamp = "2018-13-01T00:00:00";
  EXPECT_THROW(log.append(malformed), ClockError);
  EXPECT_EQ(log.events().size(), 2u);

  std::vector<ChangeEvent> later(1);
  later[0].timestamp = "2018-01-23T09:03:15";
  log.append(later);
  std::string lines = log.to_json_lines();
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 3);
}

TEST(ChangeLogTest, TimestampFormat) {
  EXPECT_TRUE(is_iso_timestamp("2018-01-21T14:33:08"));
  EXPECT_FALSE(is_iso_timestamp("2018-01-21 14:33:08"));
  EXPECT_FALSE(is_iso_timestamp("2018-01-21T24:00:00"));
  EXPECT_FALSE(is_iso_timestamp("2018-1-21T14:33:08"));
  EXPECT_FALSE(is_iso_timestamp(""));
}

TEST(ChangeEventTest, ReasonsNameTheirEvent) {
  ChangeEvent e;
  e.id = 12;
  e.description = "An entity is added to the output definition";
  e.entity_added = "has_mode_of_action";
  EXPECT_EQ(reason_for(e), "An entity is added to the output definition: has_mode_of_action (event 12)");
  EXPECT_EQ(event_of_reason(reason_for(e)), 12u);
  EXPECT_EQ(event_of_reason("MissingMapping: no mapping rule populates x"), std::nullopt);
  EXPECT_EQ(event_of_reason("(event x)"), std::nullopt);
}

class ImpactTest : public ::testing::Test {
 protected:
  void SetUp() override {
    semfed::testing::deploy_world(registry_, world_);
    context_.old_services = &world_.services;
    context_.new_services = &world_.services;
    snapshot_ = registry_.snapshot();
    context_.registry = snapshot_.get();
    context_.saved_queries = {named_query("malaria/q1.rq", kQ1)};
    context_.now = "2018-01-21T14:33:08";
  }

  World world_ = semfed::testing::scenario_world_before();
  runtime::Registry registry_;
  std::shared_ptr<const runtime::RegistryState> snapshot_;
  ImpactContext context_;
};

TEST_F(ImpactTest, DeletingASharedPropertyAffectsEveryUser) {
  DiffResult d;
  d.changes.push_back({ChangeKind::Deleted, {kDom + "has_name", EntityKind::DataProperty, "", "f"}, std::nullopt});
  auto events = impact(d, context_);
  ASSERT_EQ(events.size(), 1u);
  const auto& s = events[0].affected_services;
  EXPECT_NE(std::find(s.begin(), s.end(), "getNameByInsecticideId"), s.end());
  EXPECT_NE(std::find(s.begin(), s.end(), "getNameByPublicHealthActivityId"), s.end());
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(events[0].entity_deleted, "has_name");
  EXPECT_EQ(events[0].description, "An entity is deleted from the output definition");
  EXPECT_EQ(events[0].affected_queries, std::vector<std::string>{kQ1});
}

TEST_F(ImpactTest, UnmentionedEntityAffectsNothing) {
  DiffResult d;
  d.changes.push_back({ChangeKind::Added, {kDom + "has_colour", EntityKind::DataProperty, "", "f"}, std::nullopt});
  auto events = impact(d, context_);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_TRUE(events[0].affected_services.empty());
  EXPECT_TRUE(events[0].affected_queries.empty());
}

TEST_F(ImpactTest, DomainAdditionsAffectNothingButDeletionsDo) {
  context_.source = Source::DomainOntology;
  DiffResult d;
  d.changes.push_back({ChangeKind::Added, {kDom + "has_colour", EntityKind::DataProperty, "", "f"}, std::nullopt});
  d.changes.push_back({ChangeKind::Deleted, {kDom + "Insecticide", EntityKind::Class, "", "f"}, std::nullopt});
  auto events = impact(d, context_);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_TRUE(events[0].affected_services.empty());
  EXPECT_EQ(events[1].description, "An entity is deleted from the domain ontology");
  const auto& s = events[1].affected_services;
  EXPECT_NE(std::find(s.begin(), s.end(), "getNameByInsecticideId"), s.end());
  EXPECT_NE(std::find(s.begin(), s.end(), "getInsecticideIdByIndoorResidualSprayingId"), s.end());
}

TEST_F(ImpactTest, SchemaDeletionAffectsServicesReadingTheColumn) {
  context_.source = Source::SourceSchema;
  auto v1 = relational::parse_schema(read_fixture("malaria/schema-v1.txt"));
  auto without_name = relational::parse_schema(
      "table geographicregion(id int pk, name text)\n"
      "table insecticide(id int pk)\n"
      "table spraying(id int pk, name text, location.id int fk geographicregion.id, year int, "
      "insecticide.id int fk insecticide.id)\n");
  auto d = diff(inventory(v1), inventory(without_name));
  ASSERT_EQ(d.changes.size(), 1u);
  auto events = impact(d, context_);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].description, "An entity is deleted from the source schema");
  EXPECT_EQ(events[0].entity_deleted, "insecticide.name");
  EXPECT_EQ(events[0].affected_services, std::vector<std::string>{"getNameByInsecticideId"});

  auto added = diff(inventory(v1), inventory(relational::parse_schema(read_fixture("malaria/schema-v2.txt"))));
  EXPECT_TRUE(impact(added, context_)[0].affected_services.empty());
}

TEST_F(ImpactTest, ApplyingEventsDeactivates) {
  ChangeLog log;
  auto state = *snapshot_;
  apply_changes(state, log, {});
  EXPECT_TRUE(log.events().empty());
  for (const auto& [name, s] : state.services) EXPECT_TRUE(s->active()) << name;

  ChangeEvent a;
  a.timestamp = context_.now;
  a.description = "An entity is added to the output definition";
  a.entity_added = "has_mode_of_action";
  a.affected_services = {"getNameByInsecticideId"};
  ChangeEvent b = a;
  b.entity_added = "xsd:string";
  apply_changes(state, log, {a, b});
  const auto& s = state.get("getNameByInsecticideId");
  EXPECT_FALSE(s.active());
  EXPECT_EQ(s.inactive_reasons,
            (std::vector<std::string>{"An entity is added to the output definition: has_mode_of_action (event 1)",
                                      "An entity is added to the output definition: xsd:string (event 2)"}));
  EXPECT_TRUE(state.get("allPublicHealthActivities").active());
  expect_traceable(state, log);
}

// ---------------------------------------------------------------------------
// Controller

class ScenarioTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cm_.bootstrap(to_sources(semfed::testing::scenario_world_before()));
    cm_.set_saved_queries({named_query("malaria/q1.rq", kQ1), named_query("malaria/q1-extended.rq", kQ1Extended)});
  }

  std::string clock_ = "2018-01-21T14:33:08";
  runtime::Registry registry_;
  ChangeManager cm_{registry_, [this] { return clock_; }};
};

TEST_F(ScenarioTest, BootstrapDeploysEverything) {
  auto r = registry_.snapshot();
  EXPECT_EQ(r->services.size(), cm_.sources().services.entries().size());
  for (const auto& [name, s] : r->services) {
    EXPECT_TRUE(s->active()) << name;
    EXPECT_EQ(s->time_of_creation, "2018-01-21T14:33:08");
  }
  expect_safe(cm_);
  EXPECT_THROW(cm_.request_rebuild("getNameByInsecticideId"), NotInactive);
  EXPECT_THROW(cm_.request_rebuild("noSuchService"), runtime::NotFound);
}

TEST_F(ScenarioTest, OutputDefinitionChangeThroughRebuild) {
  auto events = cm_.ingest_service_ontology(services("malaria/svc-v2.ttl"));
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].entity_added, "has_mode_of_action");
  EXPECT_EQ(events[1].entity_added, "xsd:string");
  for (const auto& e : events) {
    EXPECT_EQ(e.timestamp, "2018-01-21T14:33:08");
    EXPECT_EQ(e.description, "An entity is added to the output definition");
    EXPECT_EQ(e.affected_services, std::vector<std::string>{"getNameByInsecticideId"});
    EXPECT_EQ(e.affected_queries, std::vector<std::string>{kQ1});
    EXPECT_FALSE(e.entity_deleted || e.entity_renamed);
  }
  EXPECT_EQ(cm_.log().events(), events);
  EXPECT_FALSE(registry_.snapshot()->get("getNameByInsecticideId").active());
  expect_safe(cm_);

  auto q1 = named_query("malaria/q1.rq", kQ1);
  try {
    query::plan(q1, *registry_.snapshot());
    FAIL() << "planned against an inactive service";
  } catch (const query::UnresolvablePattern& e) {
    EXPECT_EQ(e.predicate(), kDom + "has_name");
    EXPECT_EQ(e.inactive_candidates(), std::vector<std::string>{"getNameByInsecticideId"});
  }

  // Rebuilding against the old rules fails and keeps the service down.
  EXPECT_EQ(cm_.request_rebuild("getNameByInsecticideId"), 1u);
  EXPECT_EQ(cm_.request_rebuild("getNameByInsecticideId"), 1u);
  auto stale = cm_.run_rebuild_queue();
  ASSERT_EQ(stale.size(), 1u);
  EXPECT_FALSE(stale[0].rebuilt);
  EXPECT_EQ(stale[0].error_code, "MissingMapping");
  EXPECT_EQ(stale[0].missing_iris, std::vector<std::string>{kDom + "has_mode_of_action"});
  const auto& down = registry_.snapshot()->get("getNameByInsecticideId");
  EXPECT_FALSE(down.active());
  EXPECT_EQ(down.inactive_reasons.size(), 3u);
  EXPECT_EQ(down.inactive_reasons.back().rfind("MissingMapping: ", 0), 0u);
  EXPECT_TRUE(cm_.queue().empty());
  expect_safe(cm_);

  // Repair: domain v2, then schema and data v2 with the updated rules.
  auto after = semfed::testing::scenario_world_after();
  cm_.ingest_domain_ontology(after.domain);
  expect_safe(cm_);
  auto source_events =
      cm_.ingest_sources(after.schema, std::make_shared<const relational::Database>(after.db), after.rules);
  for (const auto& e : source_events) EXPECT_TRUE(e.affected_services.empty()) << e.description;
  expect_safe(cm_);
  for (const auto& [name, s] : registry_.snapshot()->services) {
    EXPECT_EQ(s->active(), name != "getNameByInsecticideId") << name;
  }

  clock_ = "2018-01-23T09:03:15";
  EXPECT_EQ(cm_.request_rebuild("getNameByInsecticideId"), 1u);
  auto outcomes = cm_.run_rebuild_queue();
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_TRUE(outcomes[0].rebuilt) << outcomes[0].message;
  auto r = registry_.snapshot();
  const auto& up = r->get("getNameByInsecticideId");
  EXPECT_TRUE(up.active());
  EXPECT_TRUE(up.inactive_reasons.empty());
  EXPECT_EQ(up.time_of_creation, "2018-01-21T14:33:08");
  EXPECT_EQ(up.time_of_rebuild, "2018-01-23T09:03:15");
  expect_safe(cm_);

  auto extended = named_query("malaria/q1-extended.rq", kQ1Extended);
  auto table = query::execute(query::plan(extended, *r), extended, registry_);
  EXPECT_EQ(table.rows.size(), 3u);
  EXPECT_EQ(table, semfed::testing::evaluate_conjunctive(
                       extended, semfed::testing::forward_chain(after.rules, after.db, after.domain)));
  EXPECT_EQ(table.rows[0][2], Term::string_literal("contact & airborne"));
  auto original = query::execute(query::plan(q1, *r), q1, registry_);
  EXPECT_EQ(original.rows.size(), 3u);
}

TEST_F(ScenarioTest, StaleRulesFromTheStartFail) {
  cm_.ingest_service_ontology(services("malaria/svc-v2.ttl"));
  cm_.ingest_domain_ontology(ontology::load_ontology(read_fixture("malaria/domain-v2.ttl")));
  cm_.request_rebuild("getNameByInsecticideId");
  auto outcomes = cm_.run_rebuild_queue();
  ASSERT_EQ(outcomes.size(), 1u);
  EXPECT_EQ(outcomes[0].error_code, "MissingMapping");
  EXPECT_EQ(outcomes[0].missing_iris, std::vector<std::string>{kDom + "has_mode_of_action"});
  EXPECT_FALSE(registry_.snapshot()->get("getNameByInsecticideId").active());
}

TEST_F(ScenarioTest, ClockMustNotRunBackwards) {
  clock_ = "2018-01-22T00:00:00";
  cm_.ingest_service_ontology(services("malaria/svc-v2.ttl"));
  clock_ = "2018-01-21T00:00:00";
  EXPECT_THROW(cm_.ingest_service_ontology(services("malaria/svc-v1.ttl")), ClockError);
  clock_ = "yesterday";
  EXPECT_THROW(cm_.now(), ClockError);
}

TEST_F(ScenarioTest, RulesLosingCoverageDeactivate) {
  auto w = semfed::testing::scenario_world_before();
  std::string text = read_fixture("malaria/rules-v1.psoa");
  const std::string rule =
      "Forall ?id ?name ?mode.of.action (\n    has_name(identityForInsecticide(?id) ?name) :-\n"
      "    db_insecticide(?id ?name))\n";
  auto at = text.find(rule);
  ASSERT_NE(at, std::string::npos);
  text.erase(at, rule.size());
  auto events = cm_.ingest_sources(w.schema, std::make_shared<const relational::Database>(w.db),
                                   rules::parse_rules(text, w.schema));
  ASSERT_FALSE(events.empty());
  bool found = false;
  for (const auto& e : events) {
    if (e.description == "An entity is deleted from the mapping rules" && e.entity_deleted == "has_name") {
      found = true;
      EXPECT_EQ(e.affected_services, std::vector<std::string>{"getNameByInsecticideId"});
      EXPECT_EQ(e.affected_queries, std::vector<std::string>{kQ1});
    }
  }
  EXPECT_TRUE(found);
  EXPECT_FALSE(registry_.snapshot()->get("getNameByInsecticideId").active());
  EXPECT_TRUE(registry_.snapshot()->get("getNameByPublicHealthActivityId").active());
  expect_safe(cm_);
}

TEST_F(ScenarioTest, NewServiceIsAPlaceholderUntilBuilt) {
  auto after = semfed::testing::scenario_world_after();
  cm_.ingest_domain_ontology(after.domain);
  cm_.ingest_sources(after.schema, std::make_shared<const relational::Database>(after.db), after.rules);
  std::string extra = read_fixture("malaria/svc-v2.ttl") +
                      "\nsvc:getModeByInsecticideId a serv:Service ;\n"
                      "  serv:inputClass svc:getModeByInsecticideId_Input ;\n"
                      "  serv:outputClass svc:getModeByInsecticideId_Output .\n"
                      "svc:getModeByInsecticideId_Input a owl:Class ;\n"
                      "  owl:equivalentClass dom:Insecticide .\n"
                      "svc:getModeByInsecticideId_Output a owl:Class ;\n"
                      "  owl:equivalentClass _:modeIns_out .\n"
                      "_:modeIns_out owl:intersectionOf dom:Insecticide , "
                      "[ owl:onProperty dom:has_mode_of_action ; owl:someValuesFrom xsd:string ] .\n";
  auto events = cm_.ingest_service_ontology(ontology::load_service_ontology(extra));
  const auto* placeholder = registry_.snapshot()->find("getModeByInsecticideId");
  ASSERT_NE(placeholder, nullptr);
  EXPECT_FALSE(placeholder->active());
  EXPECT_TRUE(std::any_of(events.begin(), events.end(), [](const ChangeEvent& e) {
    return e.description == "A service is added to the service ontology";
  }));
  expect_safe(cm_);
  cm_.request_rebuild("getModeByInsecticideId");
  cm_.request_rebuild("getNameByInsecticideId");
  EXPECT_EQ(cm_.queue().size(), 2u);
  auto outcomes = cm_.run_rebuild_queue();
  ASSERT_EQ(outcomes.size(), 2u);
  EXPECT_TRUE(outcomes[0].rebuilt) << outcomes[0].message;
  EXPECT_TRUE(outcomes[1].rebuilt) << outcomes[1].message;
  EXPECT_TRUE(registry_.snapshot()->get("getModeByInsecticideId").active());
  expect_safe(cm_);
}

TEST_F(ScenarioTest, ModifiedFillerIsCaughtBySafetyNet) {
  std::string text = read_fixture("malaria/svc-v1.ttl");
  // Same vocabulary, different shape: the filler names a class the
  // ontology already uses elsewhere.
  const std::string from =
      "_:insIRS_out owl:intersectionOf dom:IndoorResidualSpraying , [ owl:onProperty dom:has_insecticide ; "
      "owl:someValuesFrom dom:Insecticide ] .";
  auto at = text.find(from);
  ASSERT_NE(at, std::string::npos);
  text.replace(at, from.size(),
               "_:insIRS_out owl:intersectionOf dom:IndoorResidualSpraying , [ owl:onProperty dom:has_insecticide ; "
               "owl:someValuesFrom dom:IndoorResidualSpraying ] .");
  auto events = cm_.ingest_service_ontology(ontology::load_service_ontology(text));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].description, "The definition of a service is modified");
  EXPECT_EQ(events[0].entity_added, "getInsecticideIdByIndoorResidualSprayingId");
  EXPECT_EQ(events[0].affected_services, std::vector<std::string>{"getInsecticideIdByIndoorResidualSprayingId"});
  EXPECT_EQ(events[0].affected_queries, std::vector<std::string>{kQ1});
  expect_safe(cm_);
}

// Random walks over the fixture versions keep every active service
// consistent with the current artefacts and every inactivation traceable.
TEST(LifecyclePropertyTest, RandomWalksStaySafe) {
  auto before = semfed::testing::scenario_world_before();
  auto after = semfed::testing::scenario_world_after();
  auto svc_v1 = before.services;
  auto svc_v2 = after.services;
  std::mt19937_64 rng(42);
  for (int walk = 0; walk < 20; ++walk) {
    runtime::Registry registry;
    int tick = 0;
    auto clock = [&tick] {
      char buf[32];
      std::snprintf(buf, sizeof buf, "2018-02-%02dT00:%02d:%02d", 1 + tick / 3600, (tick / 60) % 60, tick % 60);
      return std::string(buf);
    };
    ChangeManager cm(registry, clock);
    cm.bootstrap(to_sources(before));
    for (int step = 0; step < 15; ++step) {
      ++tick;
      switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
        case 0: cm.ingest_service_ontology(rng() % 2 ? svc_v1 : svc_v2); break;
        case 1: cm.ingest_domain_ontology(rng() % 2 ? before.domain : after.domain); break;
        case 2: {
          const auto& w = rng() % 2 ? before : after;
          cm.ingest_sources(w.schema, std::make_shared<const relational::Database>(w.db), w.rules);
          break;
        }
        default: {
          for (const auto& [name, s] : registry.snapshot()->services) {
            if (!s->active()) cm.request_rebuild(name);
          }
          for (const auto& o : cm.run_rebuild_queue()) {
            if (!o.rebuilt) EXPECT_FALSE(registry.snapshot()->get(o.service).active());
          }
        }
      }
      SCOPED_TRACE("walk " + std::to_string(walk) + " step " + std::to_string(step));
      expect_safe(cm);
    }
  }
}

}  // namespace
}  // namespace semfed::change
