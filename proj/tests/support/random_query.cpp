#include "support/random_query.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semfed/rdf/vocab.hpp"

namespace semfed::testing {

namespace {

using query::PatternTerm;
using query::TriplePattern;
using query::Variable;

struct Node {
  PatternTerm term;
  std::set<std::string> classes;
  bool literal = false;  // bound to data values
  bool root = false;
  std::string producer;  // predicate that produced it
};

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[rng() % items.size()];
}

std::set<std::string> named(const rdf::ClassDescription& d) {
  std::set<std::string> out;
  for (const auto& c : d.conjuncts()) {
    if (c.kind() == rdf::ClassDescription::Kind::Named && !c.is_thing()) out.insert(c.iri());
  }
  return out;
}

rdf::ClassDescription description_of(const std::set<std::string>& classes) {
  if (classes.empty()) return rdf::ClassDescription::thing();
  std::vector<rdf::ClassDescription> members;
  for (const auto& c : classes) members.push_back(rdf::ClassDescription::named(c));
  return members.size() == 1 ? members.front() : rdf::ClassDescription::intersection_of(std::move(members));
}

class Generator {
 public:
  Generator(std::mt19937_64& rng, const runtime::RegistryState& r, const rdf::Graph& derived)
      : rng_(rng), r_(r), derived_(derived) {
    for (const auto& [name, s] : r_.services) {
      if (s->active() && s->description.is_all()) roots_.push_back(name);
    }
  }

  query::GraphQuery run() {
    std::size_t target = 2 + rng_() % 3;
    add_root();
    while (q_.patterns.size() < target) {
      std::size_t remaining = target - q_.patterns.size();
      int action = static_cast<int>(rng_() % 10);
      if (action < 2 && remaining >= 2 && join_second_root()) continue;
      if (action == 2 && type_check()) continue;
      if (!extend()) break;
    }
    if (q_.patterns.size() < 2 && !type_check()) add_type_on_root();
    add_filter();
    project();
    return q_;
  }

 private:
  std::string fresh_var() { return "v" + std::to_string(next_var_++); }

  std::vector<std::string> sample_types(const std::set<std::string>& offered) {
    std::vector<std::string> all(offered.begin(), offered.end());
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(1 + rng_() % all.size());
    return all;
  }

  void add_root_pattern(const std::string& service, const std::string& var) {
    auto offered = named(r_.get(service).description.output);
    auto types = sample_types(offered);
    for (const auto& t : types) {
      q_.patterns.push_back({Variable{var}, std::string(vocab::kRdfType), rdf::Term::iri(t)});
    }
    Node n{Variable{var}, offered, false, true, ""};
    nodes_.push_back(n);
  }

  void add_root() { add_root_pattern(pick(rng_, roots_), fresh_var()); }

  void add_type_on_root() {
    const auto& root = nodes_.front();
    std::vector<std::string> classes(root.classes.begin(), root.classes.end());
    q_.patterns.push_back({root.term, std::string(vocab::kRdfType), rdf::Term::iri(pick(rng_, classes))});
  }

  // Predicates some active service adds for instances of `n`.
  std::vector<std::pair<std::string, std::string>> offers(const Node& n) const {
    std::vector<std::pair<std::string, std::string>> out;
    if (n.literal) return out;
    for (const auto& [p, names] : r_.index) {
      for (const auto& name : r_.discover(p, description_of(n.classes))) {
        if (r_.get(name).active()) {
          out.emplace_back(p, name);
          break;
        }
      }
    }
    return out;
  }

  std::set<std::string> certified(const std::string& service, const std::string& p) const {
    for (const auto& c : r_.get(service).description.output.conjuncts()) {
      if (c.kind() == rdf::ClassDescription::Kind::ObjectSomeValuesFrom && c.iri() == p) return named(c.filler());
    }
    return {};
  }

  bool extend() {
    std::vector<std::size_t> sources;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!offers(nodes_[i]).empty()) sources.push_back(i);
    }
    if (sources.empty()) return false;
    Node from = nodes_[pick(rng_, sources)];
    auto [p, service] = pick(rng_, offers(from));
    bool object_property = r_.ontology->is_object_property(p);

    // Reuse an already produced node of the same predicate as a join.
    std::vector<std::size_t> reusable;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].root && nodes_[i].producer == p && nodes_[i].term != from.term) reusable.push_back(i);
    }
    if (!reusable.empty() && rng_() % 4 == 0) {
      q_.patterns.push_back({from.term, p, nodes_[pick(rng_, reusable)].term});
      return true;
    }

    Node to{Variable{fresh_var()}, {}, !object_property, false, p};
    if (object_property) to.classes = certified(service, p);
    if (rng_() % 5 == 0) {
      auto values = derived_.with_predicate(rdf::Term::iri(p));
      if (!values.empty()) to.term = pick(rng_, values).object;
    }
    q_.patterns.push_back({from.term, p, to.term});
    nodes_.push_back(std::move(to));
    return true;
  }

  // Adds `?r2 a T . ?r2 p ?o` for an existing produced ?o.
  bool join_second_root() {
    std::vector<std::pair<std::string, std::size_t>> options;
    for (const auto& service : roots_) {
      Node probe{Variable{"_"}, named(r_.get(service).description.output), false, true, ""};
      for (const auto& [p, provider] : offers(probe)) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
          if (!nodes_[i].root && nodes_[i].producer == p) options.emplace_back(service, i);
        }
      }
    }
    if (options.empty()) return false;
    auto [service, target] = pick(rng_, options);
    std::string var = fresh_var();
    std::size_t before = q_.patterns.size();
    add_root_pattern(service, var);
    // Keep a single type pattern so the join fits the budget.
    q_.patterns.resize(before + 1);
    q_.patterns.push_back({Variable{var}, nodes_[target].producer, nodes_[target].term});
    return true;
  }

  bool type_check() {
    std::vector<std::size_t> typed;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].root && !nodes_[i].classes.empty() && std::holds_alternative<Variable>(nodes_[i].term)) {
        typed.push_back(i);
      }
    }
    if (typed.empty()) return false;
    const auto& n = nodes_[pick(rng_, typed)];
    std::vector<std::string> classes(n.classes.begin(), n.classes.end());
    std::string c = pick(rng_, classes);
    // Sometimes ask for a superclass, which the producer certifies through
    // the hierarchy.
    std::vector<std::string> supers{c};
    for (const auto& [iri, decl] : r_.ontology->classes()) {
      if (iri != c && r_.ontology->is_subclass_of(c, iri)) supers.push_back(iri);
    }
    q_.patterns.push_back({n.term, std::string(vocab::kRdfType), rdf::Term::iri(pick(rng_, supers))});
    return true;
  }

  void add_filter() {
    if (rng_() % 2 == 0) return;
    std::vector<std::size_t> literal_vars;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].literal && std::holds_alternative<Variable>(nodes_[i].term)) literal_vars.push_back(i);
    }
    if (literal_vars.empty()) return;
    const auto& n = nodes_[pick(rng_, literal_vars)];
    auto values = derived_.with_predicate(rdf::Term::iri(n.producer));
    rdf::Term value = values.empty() || rng_() % 5 == 0 ? rdf::Term::string_literal("no such value")
                                                         : pick(rng_, values).object;
    q_.filters.push_back({std::get<Variable>(n.term).name, value});
  }

  void project() {
    auto vars = q_.variables();
    std::vector<std::string> all(vars.begin(), vars.end());
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(1 + rng_() % all.size());
    q_.projection = all;
  }

  std::mt19937_64& rng_;
  const runtime::RegistryState& r_;
  const rdf::Graph& derived_;
  std::vector<std::string> roots_;
  std::vector<Node> nodes_;
  query::GraphQuery q_;
  int next_var_ = 0;
};

}  // namespace

query::GraphQuery random_query(std::mt19937_64& rng, const runtime::RegistryState& r, const rdf::Graph& derived) {
  return Generator(rng, r, derived).run();
}

}  // namespace semfed::testing
