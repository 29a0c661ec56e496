#include "semfed/query/engine.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>

#include "semfed/rdf/turtle.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::query {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

UnresolvablePattern::UnresolvablePattern(TriplePattern pattern, std::vector<std::string> inactive_candidates)
    : Error("UnresolvablePattern",
            "no active service resolves " + to_string(pattern) +
                (inactive_candidates.empty() ? "" : " (inactive: " + join(inactive_candidates, ", ") + ")")),
      pattern_(std::move(pattern)),
      inactive_(std::move(inactive_candidates)) {}

AmbiguousPattern::AmbiguousPattern(TriplePattern pattern, std::vector<std::string> candidates)
    : Error("AmbiguousPattern", "several services resolve " + to_string(pattern) + ": " + join(candidates, ", ")),
      pattern_(std::move(pattern)),
      candidates_(std::move(candidates)) {}

QueryAborted::QueryAborted(std::size_t step, std::string service, const std::string& cause)
    : Error("QueryAborted", "query aborted at step " + std::to_string(step) + " (" + service + "): " + cause),
      step_(step),
      service_(std::move(service)) {}

std::vector<std::string> Plan::services() const {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(s.service);
  return out;
}

namespace {

// The query with every constant in subject/object position replaced by a
// node named after its Turtle form, which cannot clash with a variable name.
struct Normalized {
  struct Edge {
    std::string subject;
    std::string predicate;
    std::string object;
    std::size_t origin;  // index into the query's patterns
  };
  std::vector<Edge> edges;                              // non-rdf:type patterns
  std::map<std::string, std::vector<std::string>> types;  // node -> rdf:type classes
  std::map<std::string, std::size_t> type_origin;         // node -> first rdf:type pattern
  std::map<std::string, std::vector<rdf::Term>> constraints;
  std::vector<std::string> nodes;  // order of first appearance
};

std::string node_name(const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) return v->name;
  return to_string(t);
}

Normalized normalize(const GraphQuery& q) {
  Normalized n;
  std::set<std::string> seen;
  auto see = [&](const PatternTerm& t) {
    std::string name = node_name(t);
    if (seen.insert(name).second) {
      n.nodes.push_back(name);
      if (const auto* c = std::get_if<rdf::Term>(&t)) n.constraints[name].push_back(*c);
    }
    return name;
  };
  for (std::size_t i = 0; i < q.patterns.size(); ++i) {
    const auto& p = q.patterns[i];
    std::string s = see(p.subject);
    const auto* cls = std::get_if<rdf::Term>(&p.object);
    if (p.is_type() && cls != nullptr && cls->is_iri()) {
      n.types[s].push_back(cls->value());
      n.type_origin.emplace(s, i);
      continue;
    }
    if (p.is_type()) throw UnresolvablePattern(p, {});
    n.edges.push_back({s, p.predicate, see(p.object), i});
  }
  for (const auto& f : q.filters) n.constraints[f.variable].push_back(f.value);
  return n;
}

rdf::ClassDescription description_of(const std::set<std::string>& classes) {
  if (classes.empty()) return rdf::ClassDescription::thing();
  if (classes.size() == 1) return rdf::ClassDescription::named(*classes.begin());
  std::vector<rdf::ClassDescription> members;
  for (const auto& c : classes) members.push_back(rdf::ClassDescription::named(c));
  return rdf::ClassDescription::intersection_of(std::move(members));
}

std::set<std::string> named_conjuncts(const rdf::ClassDescription& d) {
  std::set<std::string> out;
  for (const auto& c : d.conjuncts()) {
    if (c.kind() == rdf::ClassDescription::Kind::Named && !c.is_thing()) out.insert(c.iri());
  }
  return out;
}

// Named classes the service certifies for the values of `property`.
std::set<std::string> certified_classes(const forge::ExecutableService& s, const std::string& property) {
  for (const auto& c : s.description.output.conjuncts()) {
    if (c.kind() == rdf::ClassDescription::Kind::ObjectSomeValuesFrom && c.iri() == property) {
      return named_conjuncts(c.filler());
    }
  }
  return {};
}

class Planner {
 public:
  Planner(const GraphQuery& q, const runtime::RegistryState& r, const PlanOptions& options)
      : q_(q), r_(r), options_(options), n_(normalize(q)) {}

  Plan run() {
    std::set<std::string> objects;
    for (const auto& e : n_.edges) objects.insert(e.object);
    for (const auto& node : n_.nodes) {
      if (!objects.count(node)) plan_root(node);
    }
    if (plan_.steps.empty()) throw UnresolvablePattern(q_.patterns.front(), {});

    std::vector<bool> done(n_.edges.size(), false);
    for (std::size_t remaining = n_.edges.size(); remaining > 0; --remaining) {
      std::size_t next = n_.edges.size();
      for (std::size_t i = 0; i < n_.edges.size() && next == n_.edges.size(); ++i) {
        if (!done[i] && classes_.count(n_.edges[i].subject)) next = i;
      }
      if (next == n_.edges.size()) {
        auto first = std::find(done.begin(), done.end(), false) - done.begin();
        throw UnresolvablePattern(q_.patterns[n_.edges[first].origin], {});
      }
      plan_edge(n_.edges[next]);
      done[next] = true;
    }
    return std::move(plan_);
  }

 private:
  std::string choose(const TriplePattern& pattern, const std::vector<std::string>& candidates) {
    std::vector<std::string> active;
    std::vector<std::string> inactive;
    for (const auto& name : candidates) (r_.get(name).active() ? active : inactive).push_back(name);
    if (active.empty()) throw UnresolvablePattern(pattern, inactive);
    if (active.size() > 1 && !options_.tie_break) throw AmbiguousPattern(pattern, active);
    return *std::min_element(active.begin(), active.end());
  }

  void plan_root(const std::string& node) {
    auto types = n_.types.find(node);
    if (types == n_.types.end()) {
      for (const auto& e : n_.edges) {
        if (e.subject == node) throw UnresolvablePattern(q_.patterns[e.origin], {});
      }
      return;  // constants only used as objects are not produced by anything
    }
    const TriplePattern& pattern = q_.patterns[n_.type_origin.at(node)];
    std::vector<std::string> candidates;
    for (const auto& [name, s] : r_.services) {
      if (!s->description.is_all()) continue;
      auto offered = named_conjuncts(s->description.output);
      if (std::all_of(types->second.begin(), types->second.end(), [&](const auto& t) { return offered.count(t); })) {
        candidates.push_back(name);
      }
    }
    std::string service = choose(pattern, candidates);
    auto classes = named_conjuncts(r_.get(service).description.output);
    classes.insert(types->second.begin(), types->second.end());
    classes_[node] = std::move(classes);
    plan_.steps.push_back({service, node, std::nullopt, std::nullopt});
  }

  bool certifies(const std::set<std::string>& certified, const std::string& wanted) const {
    return std::any_of(certified.begin(), certified.end(), [&](const auto& c) {
      return c == wanted || (r_.ontology && r_.ontology->is_subclass_of(c, wanted));
    });
  }

  void plan_edge(const Normalized::Edge& e) {
    const TriplePattern& pattern = q_.patterns[e.origin];
    std::string service = choose(pattern, r_.discover(e.predicate, description_of(classes_.at(e.subject))));
    plan_.steps.push_back({service, e.object, e.subject, e.origin});
    if (classes_.count(e.object)) return;  // a join on an already bound node

    auto certified = certified_classes(r_.get(service), e.predicate);
    auto types = n_.types.find(e.object);
    if (types != n_.types.end()) {
      for (const auto& t : types->second) {
        if (!certifies(certified, t)) throw UnresolvablePattern(q_.patterns[n_.type_origin.at(e.object)], {});
      }
      certified.insert(types->second.begin(), types->second.end());
    }
    classes_[e.object] = std::move(certified);
  }

  const GraphQuery& q_;
  const runtime::RegistryState& r_;
  PlanOptions options_;
  Normalized n_;
  std::map<std::string, std::set<std::string>> classes_;  // bound node -> known classes
  Plan plan_;
};

}  // namespace

Plan plan(const GraphQuery& q, const runtime::RegistryState& r, const PlanOptions& options) {
  check_query(q);
  return Planner(q, r, options).run();
}

void canonicalize(BindingTable& t) {
  auto less = [](const std::vector<rdf::Term>& a, const std::vector<rdf::Term>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(t.rows.begin(), t.rows.end(), less);
  t.rows.erase(std::unique(t.rows.begin(), t.rows.end()), t.rows.end());
}

namespace {

using SnapshotFn = std::function<std::shared_ptr<const runtime::RegistryState>()>;
using Row = std::vector<std::optional<rdf::Term>>;

enum class Mode { Parallel, SequentialRequests, Serial };

class Executor {
 public:
  Executor(const Plan& p, const GraphQuery& q, SnapshotFn snapshot, const ExecuteOptions& options, Mode mode)
      : p_(p), q_(q), n_(normalize(q)), snapshot_(std::move(snapshot)), options_(options), mode_(mode) {
    for (const auto& node : n_.nodes) slot_.emplace(node, slot_.size());
    for (const auto& step : p_.steps) {
      if (!slot_.count(step.binds) || (step.from && !slot_.count(*step.from))) {
        throw std::invalid_argument("plan does not match the query");
      }
    }
  }

  BindingTable run() {
    std::vector<Row> rows{Row(slot_.size())};
    for (const auto& level : levels()) {
      for (std::size_t i : level) {
        if (options_.before_step) options_.before_step(i);
      }
      auto state = snapshot_();
      auto outputs = invoke_level(*state, level, rows);
      for (std::size_t k = 0; k < level.size(); ++k) {
        rows = extend(rows, p_.steps[level[k]], *outputs[k]);
        if (options_.push_filters) rows = constrain(rows, p_.steps[level[k]].binds);
      }
    }
    for (const auto& [node, values] : n_.constraints) rows = constrain(rows, node);

    BindingTable t;
    t.columns = q_.projection;
    for (const auto& row : rows) {
      std::vector<rdf::Term> out;
      for (const auto& c : t.columns) out.push_back(*row[slot_.at(c)]);
      t.rows.push_back(std::move(out));
    }
    canonicalize(t);
    return t;
  }

 private:
  // Steps grouped by depth from the roots, each group in plan order.
  std::vector<std::vector<std::size_t>> levels() const {
    std::map<std::string, std::size_t> depth;
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < p_.steps.size(); ++i) {
      const auto& step = p_.steps[i];
      std::size_t d = step.is_root() ? 0 : depth.at(*step.from) + 1;
      depth.emplace(step.binds, d);
      if (out.size() <= d) out.resize(d + 1);
      out[d].push_back(i);
    }
    return out;
  }

  rdf::Graph request(const runtime::RegistryState& r, const PlanStep& step, const std::vector<Row>& rows) const {
    static const rdf::Term kType = rdf::Term::iri(std::string(vocab::kRdfType));
    rdf::Graph g;
    if (step.is_root()) {
      g.insert(rdf::Term::iri("urn:semfed:query"), kType, rdf::Term::iri(std::string(vocab::kOwlThing)));
      return g;
    }
    // Input instances are typed with the named classes the service asks for.
    const auto& input = r.get(step.service).description.input;
    std::vector<rdf::Term> classes;
    for (const auto& c : named_conjuncts(input)) classes.push_back(rdf::Term::iri(c));
    if (classes.empty()) classes.push_back(rdf::Term::iri(std::string(vocab::kOwlThing)));
    std::size_t from = slot_.at(*step.from);
    for (const auto& row : rows) {
      const auto& v = row[from];
      if (!v || v->is_literal()) continue;
      for (const auto& c : classes) g.insert(*v, kType, c);
    }
    return g;
  }

  // One output graph per step of the level. Steps sharing a service and an
  // input node share one invocation.
  std::vector<std::shared_ptr<const rdf::Graph>> invoke_level(const runtime::RegistryState& r,
                                                              const std::vector<std::size_t>& level,
                                                              const std::vector<Row>& rows) const {
    std::map<std::pair<std::string, std::string>, std::size_t> shared;
    std::vector<std::size_t> owner;  // request -> first step index
    std::vector<std::size_t> request_of(level.size());
    for (std::size_t k = 0; k < level.size(); ++k) {
      const auto& step = p_.steps[level[k]];
      auto [it, fresh] = shared.emplace(std::pair{step.service, step.from.value_or("")}, owner.size());
      if (fresh) owner.push_back(level[k]);
      request_of[k] = it->second;
    }

    std::vector<std::shared_ptr<const rdf::Graph>> results(owner.size());
    std::vector<std::exception_ptr> failures(owner.size());
    auto call = [&](std::size_t i) {
      try {
        const auto& step = p_.steps[owner[i]];
        auto input = request(r, step, rows);
        auto result = mode_ == Mode::Serial ? runtime::invoke_serial(r, step.service, input)
                                            : runtime::invoke(r, step.service, input);
        results[i] = std::make_shared<const rdf::Graph>(std::move(result.output));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    };
    if (mode_ == Mode::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t i = 0; i < owner.size(); ++i) call(i);
    } else {
      for (std::size_t i = 0; i < owner.size(); ++i) call(i);
    }

    // Report the failure of the earliest step, whatever finished first.
    for (std::size_t i = 0; i < owner.size(); ++i) {
      if (!failures[i]) continue;
      const auto& step = p_.steps[owner[i]];
      try {
        std::rethrow_exception(failures[i]);
      } catch (const runtime::ServiceInactive& e) {
        throw QueryAborted(owner[i], step.service, e.what());
      } catch (const runtime::NotFound& e) {
        throw QueryAborted(owner[i], step.service, e.what());
      }
    }
    std::vector<std::shared_ptr<const rdf::Graph>> out;
    for (std::size_t k = 0; k < level.size(); ++k) out.push_back(results[request_of[k]]);
    return out;
  }

  std::vector<Row> extend(const std::vector<Row>& rows, const PlanStep& step, const rdf::Graph& output) const {
    std::vector<Row> out;
    std::size_t binds = slot_.at(step.binds);
    if (step.is_root()) {
      static const rdf::Term kType = rdf::Term::iri(std::string(vocab::kRdfType));
      std::vector<rdf::Term> values;
      const auto& types = n_.types.at(step.binds);
      for (const auto& s : output.subjects()) {
        bool typed = std::all_of(types.begin(), types.end(), [&](const auto& t) {
          return output.contains(rdf::Triple(s, kType, rdf::Term::iri(t)));
        });
        if (typed) values.push_back(s);
      }
      for (const auto& row : rows) {
        for (const auto& v : values) {
          out.push_back(row);
          out.back()[binds] = v;
        }
      }
      return out;
    }
    rdf::Term predicate = rdf::Term::iri(q_.patterns[*step.pattern].predicate);
    std::size_t from = slot_.at(*step.from);
    for (const auto& row : rows) {
      auto [begin, end] = output.match(*row[from], predicate);
      for (auto it = begin; it != end; ++it) {
        if (row[binds]) {
          if (*row[binds] == it->object) out.push_back(row);
          continue;
        }
        out.push_back(row);
        out.back()[binds] = it->object;
      }
    }
    return out;
  }

  std::vector<Row> constrain(std::vector<Row> rows, const std::string& node) const {
    auto it = n_.constraints.find(node);
    if (it == n_.constraints.end()) return rows;
    std::size_t slot = slot_.at(node);
    std::erase_if(rows, [&](const Row& row) {
      return row[slot] && std::any_of(it->second.begin(), it->second.end(), [&](const auto& v) { return *row[slot] != v; });
    });
    return rows;
  }

  const Plan& p_;
  const GraphQuery& q_;
  Normalized n_;
  SnapshotFn snapshot_;
  ExecuteOptions options_;
  Mode mode_;
  std::map<std::string, std::size_t> slot_;
};

}  // namespace

BindingTable execute(const Plan& p, const GraphQuery& q, const runtime::Registry& r, const ExecuteOptions& options) {
  return Executor(p, q, [&r] { return r.snapshot(); }, options,
                  options.parallel ? Mode::Parallel : Mode::SequentialRequests)
      .run();
}

BindingTable execute(const Plan& p, const GraphQuery& q, const runtime::RegistryState& r,
                     const ExecuteOptions& options) {
  std::shared_ptr<const runtime::RegistryState> fixed(std::shared_ptr<void>(), &r);
  return Executor(p, q, [fixed] { return fixed; }, options,
                  options.parallel ? Mode::Parallel : Mode::SequentialRequests)
      .run();
}

BindingTable execute_serial(const Plan& p, const GraphQuery& q, const runtime::RegistryState& r) {
  std::shared_ptr<const runtime::RegistryState> fixed(std::shared_ptr<void>(), &r);
  ExecuteOptions options;
  options.parallel = false;
  return Executor(p, q, [fixed] { return fixed; }, options, Mode::Serial).run();
}

std::string format_table(const BindingTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "\t?" : "?") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "\t";
      out += rdf::format_term(row[i], {});
    }
    out += "\n";
  }
  return out;
}

}  // namespace semfed::query
