#include "semfed/forge/service_forge.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "semfed/rdf/vocab.hpp"

namespace semfed::forge {

using ontology::ServiceDescription;
using rdf::ClassDescription;
using relational::ColumnRef;
using relational::ColumnType;
using relational::Param;
using relational::QueryPlan;
using relational::RelationalSchema;
using relational::TableDef;
using rules::IdentityFunction;
using rules::MembershipRule;
using rules::PropertyRule;
using rules::RuleSet;

namespace {

std::string join_iris(const std::vector<std::string>& iris) {
  std::string out;
  for (const auto& iri : iris) {
    if (!out.empty()) out += ", ";
    out += iri;
  }
  return out;
}

}  // namespace

MissingMappingError::MissingMappingError(std::vector<std::string> iris)
    : Error("MissingMapping", "no mapping rule populates " + join_iris(iris)), iris_(std::move(iris)) {}

rdf::Term mint_iri(const IdentityFunction& f, std::int64_t key, std::string_view base) {
  if (key < 0) throw std::invalid_argument("instance keys must be non-negative");
  return rdf::Term::iri(std::string(base) + f.table + "/" + std::to_string(key));
}

std::int64_t parse_iri(const IdentityFunction& f, std::string_view iri, std::string_view base) {
  std::string prefix = std::string(base) + f.table + "/";
  if (iri.size() <= prefix.size() || iri.substr(0, prefix.size()) != prefix) throw ParseFailure(std::string(iri));
  std::string_view digits = iri.substr(prefix.size());
  if (digits.size() > 1 && digits.front() == '0') throw ParseFailure(std::string(iri));
  std::int64_t key = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), key);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.front() == '-') {
    throw ParseFailure(std::string(iri));
  }
  return key;
}

std::string ExecutableService::plan_text() const {
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += "; ";
    out += part.plan.to_string();
  }
  return out;
}

namespace {

class Synthesizer {
 public:
  Synthesizer(const ServiceDescription& d, const RuleSet& rs, const RelationalSchema& schema,
              const ontology::DomainOntology& ont)
      : d_(d), rs_(rs), schema_(schema), ont_(ont) {}

  ExecutableService run(std::string_view instance_base) {
    ExecutableService s;
    s.description = d_;
    s.instance_base = std::string(instance_base);
    if (d_.is_all()) {
      build_enumeration(s);
    } else {
      s.subject_function = subject_function();
      build_decorations(s);
    }
    return s;
  }

 private:
  static std::vector<std::string> named_classes(const ClassDescription& d) {
    std::vector<std::string> out;
    for (const auto& c : d.conjuncts()) {
      if (c.kind() == ClassDescription::Kind::Named && !c.is_thing()) out.push_back(c.iri());
    }
    return out;
  }

  bool populates_all(const MembershipRule& r, const std::vector<std::string>& classes) const {
    return std::all_of(classes.begin(), classes.end(),
                       [&](const std::string& c) { return ont_.is_subclass_of(r.class_iri, c); });
  }

  const IdentityFunction& function(const std::string& name) const {
    const IdentityFunction* f = rs_.function(name);
    if (f == nullptr) throw MissingMappingError({name});
    return *f;
  }

  const TableDef& table(const std::string& name) const {
    const TableDef* t = schema_.find(name);
    if (t == nullptr) throw rules::UnknownTable(name);
    return *t;
  }

  ColumnRef column_at(const rules::BodyAtom& body, std::size_t position) const {
    return {body.table, table(body.table).columns.at(position).name};
  }

  // allX: Project[key](Scan(T)) for the one membership rule whose class sits
  // below every output class.
  void build_enumeration(ExecutableService& s) const {
    auto classes = named_classes(d_.output);
    std::vector<const MembershipRule*> candidates;
    for (const auto& r : rs_.membership_rules()) {
      if (populates_all(r, classes)) candidates.push_back(&r);
    }
    if (candidates.empty()) throw MissingMappingError(classes);
    if (candidates.size() > 1) throw AmbiguousMapping(classes.front());
    const MembershipRule& r = *candidates.front();
    s.subject_function = function(r.function);
    ColumnRef key = column_at(r.body, r.key_position());
    PlanPart part{QueryPlan::project(QueryPlan::scan(schema_, r.body.table), {key}), 0, {}};
    for (const auto& c : classes) {
      Emitter e;
      e.kind = Emitter::Kind::Type;
      e.property = std::string(vocab::kRdfType);
      e.class_iri = c;
      part.emitters.push_back(std::move(e));
    }
    s.parts.push_back(std::move(part));
  }

  // The one identity function that populates every named input class.
  IdentityFunction subject_function() const {
    auto classes = named_classes(d_.input);
    std::set<std::string> candidates;
    if (classes.empty()) {
      for (const auto& c : d_.new_conjuncts()) {
        if (!c.is_restriction()) continue;
        std::set<std::string> here;
        for (const auto* r : rs_.rules_for_property(c.iri())) here.insert(r->subject_function);
        if (candidates.empty()) {
          candidates = std::move(here);
        } else {
          std::set<std::string> both;
          std::set_intersection(candidates.begin(), candidates.end(), here.begin(), here.end(),
                                std::inserter(both, both.end()));
          candidates = std::move(both);
        }
      }
      if (candidates.empty()) throw MissingMappingError({d_.input.canonical()});
      if (candidates.size() > 1) throw AmbiguousMapping(d_.input.canonical());
      return function(*candidates.begin());
    }
    std::map<std::string, std::set<std::string>> covered;  // function -> classes it populates
    for (const auto& r : rs_.membership_rules()) {
      for (const auto& c : classes) {
        if (ont_.is_subclass_of(r.class_iri, c)) covered[r.function].insert(c);
      }
    }
    for (const auto& [f, cs] : covered) {
      if (cs.size() == classes.size()) candidates.insert(f);
    }
    if (candidates.empty()) throw MissingMappingError(classes);
    if (candidates.size() > 1) throw AmbiguousMapping(classes.front());
    return function(*candidates.begin());
  }

  const PropertyRule& property_rule(const std::string& property, const std::string& subject, bool object) const {
    std::vector<const PropertyRule*> matching;
    for (const auto* r : rs_.rules_for_property(property)) {
      if (r->subject_function == subject && r->object_function.has_value() == object) matching.push_back(r);
    }
    if (matching.empty()) throw MissingMappingError({property});
    if (matching.size() > 1) throw AmbiguousMapping(property);
    return *matching.front();
  }

  QueryPlan keyed_scan(const PropertyRule& r) const {
    return QueryPlan::select(QueryPlan::scan(schema_, r.body.table), column_at(r.body, r.subject_position()),
                             Param{0});
  }

  void check_datatype(const PropertyRule& r, const std::string& datatype) const {
    ColumnRef col = column_at(r.body, r.object_position());
    ColumnType type = table(col.table).column(col.column)->type;
    if (type == ColumnType::Text && datatype != vocab::kXsdString) {
      throw MappingTypeError(r.property_iri, datatype, col.table + "." + col.column);
    }
  }

  // Join the rule's object column to the key of the object function's table
  // along a declared foreign key.
  QueryPlan join_object(const PropertyRule& r, QueryPlan left, const IdentityFunction& g,
                        ColumnRef& object_column) const {
    ColumnRef fk_col = column_at(r.body, r.object_position());
    const relational::ForeignKey* fk = table(r.body.table).foreign_key(fk_col.column);
    if (fk == nullptr || fk->table != g.table || fk->target_column != g.key_column) {
      throw MissingMappingError({r.property_iri});
    }
    object_column = {g.table, g.key_column};
    return QueryPlan::join(std::move(left), QueryPlan::scan(schema_, g.table), fk_col, object_column);
  }

  void require_object_class(const IdentityFunction& g, const std::string& class_iri) const {
    for (const auto& m : rs_.membership_rules()) {
      if (m.function == g.name && m.body.table == g.table && ont_.is_subclass_of(m.class_iri, class_iri)) return;
    }
    throw MissingMappingError({class_iri});
  }

  relational::Value column_value(const ColumnRef& col, const rdf::Term& literal, const std::string& property) const {
    if (table(col.table).column(col.column)->type == ColumnType::Text) return literal.value();
    std::int64_t v = 0;
    const std::string& lex = literal.value();
    auto [end, ec] = std::from_chars(lex.data(), lex.data() + lex.size(), v);
    if (ec != std::errc() || end != lex.data() + lex.size()) {
      throw MappingTypeError(property, literal.datatype(), col.table + "." + col.column);
    }
    return v;
  }

  void build_decorations(ExecutableService& s) const {
    const std::string& subject = s.subject_function.name;
    struct DataGroup {
      std::vector<ColumnRef> columns;
      std::vector<Emitter> emitters;
      const PropertyRule* rule = nullptr;
    };
    // (body table, subject column) -> data restrictions read from that row
    std::map<std::pair<std::string, std::size_t>, DataGroup> groups;
    std::vector<PlanPart> singles;

    for (const auto& c : d_.new_conjuncts()) {
      switch (c.kind()) {
        case ClassDescription::Kind::Named: {
          std::vector<const MembershipRule*> rules;
          for (const auto& m : rs_.membership_rules()) {
            if (m.function == subject && ont_.is_subclass_of(m.class_iri, c.iri())) rules.push_back(&m);
          }
          if (rules.empty()) throw MissingMappingError({c.iri()});
          if (rules.size() > 1) throw AmbiguousMapping(c.iri());
          const MembershipRule& m = *rules.front();
          ColumnRef key = column_at(m.body, m.key_position());
          QueryPlan plan = QueryPlan::project(QueryPlan::select(QueryPlan::scan(schema_, m.body.table), key, Param{0}),
                                              {key});
          Emitter e;
          e.kind = Emitter::Kind::Type;
          e.property = std::string(vocab::kRdfType);
          e.class_iri = c.iri();
          singles.push_back({std::move(plan), std::nullopt, {std::move(e)}});
          break;
        }
        case ClassDescription::Kind::IntersectionOf:
          break;  // conjuncts are never intersections
        case ClassDescription::Kind::DataSomeValuesFrom: {
          const PropertyRule& r = property_rule(c.iri(), subject, false);
          check_datatype(r, c.datatype());
          DataGroup& g = groups[{r.body.table, r.subject_position()}];
          g.rule = &r;
          ColumnRef col = column_at(r.body, r.object_position());
          auto it = std::find(g.columns.begin(), g.columns.end(), col);
          std::size_t index = static_cast<std::size_t>(it - g.columns.begin());
          if (it == g.columns.end()) g.columns.push_back(col);
          Emitter e;
          e.kind = Emitter::Kind::Literal;
          e.property = c.iri();
          e.column = index;
          e.datatype = c.datatype();
          g.emitters.push_back(std::move(e));
          break;
        }
        case ClassDescription::Kind::DataHasValue: {
          const PropertyRule& r = property_rule(c.iri(), subject, false);
          ColumnRef col = column_at(r.body, r.object_position());
          QueryPlan plan = QueryPlan::select(keyed_scan(r), col, column_value(col, *c.value(), c.iri()));
          Emitter e;
          e.kind = Emitter::Kind::Literal;
          e.property = c.iri();
          e.datatype = c.value()->datatype();
          singles.push_back({QueryPlan::project(std::move(plan), {col}), std::nullopt, {std::move(e)}});
          break;
        }
        case ClassDescription::Kind::ObjectSomeValuesFrom: {
          const ClassDescription& filler = c.filler();
          if (filler.kind() != ClassDescription::Kind::Named) {
            auto nested = filler.properties();
            throw MissingMappingError(nested.empty() ? std::vector<std::string>{c.iri()}
                                                     : std::vector<std::string>(nested.begin(), nested.end()));
          }
          const PropertyRule& r = property_rule(c.iri(), subject, true);
          const IdentityFunction& g = function(*r.object_function);
          Emitter e;
          e.kind = Emitter::Kind::Object;
          e.property = c.iri();
          e.object_function = g;
          if (!filler.is_thing()) {
            require_object_class(g, filler.iri());
            e.class_iri = filler.iri();
          }
          ColumnRef object_column;
          QueryPlan plan = join_object(r, keyed_scan(r), g, object_column);
          singles.push_back({QueryPlan::project(std::move(plan), {object_column}), std::nullopt, {std::move(e)}});
          break;
        }
        case ClassDescription::Kind::ObjectHasValue: {
          const PropertyRule& r = property_rule(c.iri(), subject, true);
          const IdentityFunction& g = function(*r.object_function);
          std::int64_t key = 0;
          try {
            key = parse_iri(g, c.value()->value(), s.instance_base);
          } catch (const ParseFailure&) {
            throw MissingMappingError({c.iri()});
          }
          ColumnRef col = column_at(r.body, r.object_position());
          QueryPlan plan = QueryPlan::select(keyed_scan(r), col, relational::Value{key});
          Emitter e;
          e.kind = Emitter::Kind::Object;
          e.property = c.iri();
          e.object_function = g;
          singles.push_back({QueryPlan::project(std::move(plan), {col}), std::nullopt, {std::move(e)}});
          break;
        }
      }
    }

    for (auto& [key, g] : groups) {
      s.parts.push_back({QueryPlan::project(keyed_scan(*g.rule), g.columns), std::nullopt, std::move(g.emitters)});
    }
    for (auto& part : singles) s.parts.push_back(std::move(part));
  }

  const ServiceDescription& d_;
  const RuleSet& rs_;
  const RelationalSchema& schema_;
  const ontology::DomainOntology& ont_;
};

}  // namespace

ExecutableService synthesize(const ServiceDescription& d, const RuleSet& rs, const RelationalSchema& schema,
                             const ontology::DomainOntology& ont, std::string_view instance_base) {
  ontology::check_service_shape(d);
  std::set<rules::MissingMapping> missing;
  for (const auto& m : rules::coverage_check(rs, d.input, ont)) missing.insert(m);
  for (const auto& m : rules::coverage_check(rs, d.output, ont)) missing.insert(m);
  if (!missing.empty()) {
    std::vector<std::string> iris;
    for (const auto& m : missing) iris.push_back(m.iri);
    throw MissingMappingError(std::move(iris));
  }
  ontology::validate(d, ont);
  return Synthesizer(d, rs, schema, ont).run(instance_base);
}

namespace {

void emit_row(const ExecutableService& s, const Emitter& e, const rdf::Term& subject, const relational::Row& row,
              std::vector<rdf::Triple>& out) {
  static const rdf::Term rdf_type = rdf::Term::iri(std::string(vocab::kRdfType));
  switch (e.kind) {
    case Emitter::Kind::Type:
      out.emplace_back(subject, rdf_type, rdf::Term::iri(*e.class_iri));
      break;
    case Emitter::Kind::Literal: {
      std::string lexical = relational::to_string(row.at(e.column));
      // Values that cannot be written in the declared datatype entail nothing.
      if (!rdf::is_valid_lexical(lexical, e.datatype)) break;
      out.emplace_back(subject, rdf::Term::iri(e.property), rdf::Term::literal(std::move(lexical), e.datatype));
      break;
    }
    case Emitter::Kind::Object: {
      const auto* key = std::get_if<std::int64_t>(&row.at(e.column));
      if (key == nullptr || *key < 0) break;
      rdf::Term object = mint_iri(*e.object_function, *key, s.instance_base);
      out.emplace_back(subject, rdf::Term::iri(e.property), object);
      if (e.class_iri) out.emplace_back(object, rdf_type, rdf::Term::iri(*e.class_iri));
      break;
    }
  }
}

}  // namespace

std::vector<rdf::Triple> decorate(const ExecutableService& s, const relational::Database& db,
                                  const rdf::Term& instance) {
  std::vector<rdf::Triple> out;
  std::vector<relational::Value> params;
  if (!s.description.is_all()) {
    if (!instance.is_iri()) throw ParseFailure(instance.key());
    params.push_back(parse_iri(s.subject_function, instance.value(), s.instance_base));
  }
  for (const auto& part : s.parts) {
    for (const auto& row : relational::execute_plan(db, part.plan, params)) {
      rdf::Term subject = instance;
      if (part.subject_column) {
        const auto* key = std::get_if<std::int64_t>(&row.at(*part.subject_column));
        if (key == nullptr || *key < 0) continue;
        subject = mint_iri(s.subject_function, *key, s.instance_base);
      }
      for (const auto& e : part.emitters) emit_row(s, e, subject, row, out);
    }
  }
  std::sort(out.begin(), out.end(), rdf::CanonicalTripleLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace semfed::forge
