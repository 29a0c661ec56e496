#include "semfed/runtime/registry.hpp"

#include <algorithm>
#include <exception>

#include "semfed/ontology/service_ontology.hpp"
#include "semfed/rdf/vocab.hpp"

namespace semfed::runtime {

namespace {

std::string reason_list(const std::vector<std::string>& reasons) {
  std::string out;
  for (const auto& r : reasons) {
    if (!out.empty()) out += "; ";
    out += r;
  }
  return out.empty() ? "no reason recorded" : out;
}

}  // namespace

ServiceInactive::ServiceInactive(std::string name, std::vector<std::string> reasons)
    : Error("ServiceInactive", "service " + name + " is inactive: " + reason_list(reasons)),
      name_(std::move(name)),
      reasons_(std::move(reasons)) {}

const forge::ExecutableService* RegistryState::find(std::string_view name) const {
  auto it = services.find(std::string(name));
  return it == services.end() ? nullptr : it->second.get();
}

const forge::ExecutableService& RegistryState::get(std::string_view name) const {
  const auto* s = find(name);
  if (s == nullptr) throw NotFound(std::string(name));
  return *s;
}

std::vector<std::string> RegistryState::discover(const std::string& property,
                                                 const rdf::ClassDescription& input) const {
  std::vector<std::string> out;
  auto it = index.find(property);
  if (it == index.end()) return out;
  auto offered = input.conjuncts();
  for (const auto& name : it->second) {
    const auto& input_class = services.at(name)->description.input;
    auto required = input_class.conjuncts();
    bool satisfied = input_class.is_thing() || std::all_of(required.begin(), required.end(), [&](const auto& c) {
                       return std::find(offered.begin(), offered.end(), c) != offered.end();
                     });
    if (satisfied) out.push_back(name);
  }
  return out;
}

void RegistryState::deploy(forge::ExecutableService s, const std::string& now) {
  const auto* prior = find(s.description.name);
  if (prior != nullptr) {
    s.time_of_creation = prior->time_of_creation;
    s.time_of_rebuild = now;
  } else {
    s.time_of_creation = now;
    s.time_of_rebuild.reset();
  }
  std::string name = s.description.name;
  services[name] = std::make_shared<const forge::ExecutableService>(std::move(s));
}

void RegistryState::modify(std::string_view name, const std::function<void(forge::ExecutableService&)>& fn) {
  auto copy = get(name);
  fn(copy);
  services[std::string(name)] = std::make_shared<const forge::ExecutableService>(std::move(copy));
}

void RegistryState::remove(std::string_view name) { services.erase(std::string(name)); }

void RegistryState::reindex() {
  index.clear();
  for (const auto& [name, s] : services) {
    for (const auto& c : s->description.new_conjuncts()) {
      for (const auto& p : c.properties()) index[p].insert(name);
    }
  }
}

Registry::Registry() : state_(std::make_shared<const RegistryState>()) {}

std::shared_ptr<const RegistryState> Registry::snapshot() const {
  std::lock_guard lock(read_mutex_);
  return state_;
}

void Registry::transact(const std::function<void(RegistryState&)>& fn) {
  std::lock_guard writer(write_mutex_);
  auto next = std::make_shared<RegistryState>(*snapshot());
  fn(*next);
  next->reindex();
  std::lock_guard lock(read_mutex_);
  state_ = std::move(next);
}

void Registry::deploy(forge::ExecutableService s, const std::string& now) {
  transact([&](RegistryState& r) { r.deploy(std::move(s), now); });
}

rdf::Graph describe(const RegistryState& r, std::string_view name) {
  const auto& s = r.get(name);
  rdf::Graph g(ontology::service_prefixes());
  ontology::encode_service(g, s.description);
  rdf::Term service = rdf::Term::iri(s.description.iri);
  auto iri = [](std::string_view v) { return rdf::Term::iri(std::string(v)); };
  g.insert(service, iri(vocab::kServStatus), rdf::Term::string_literal(s.active() ? "active" : "inactive"));
  for (const auto& reason : s.inactive_reasons) {
    g.insert(service, iri(vocab::kServInactiveReason), rdf::Term::string_literal(reason));
  }
  if (!s.time_of_creation.empty()) {
    g.insert(service, iri(vocab::kServTimeOfCreation), rdf::Term::string_literal(s.time_of_creation));
  }
  if (s.time_of_rebuild) {
    g.insert(service, iri(vocab::kServTimeOfRebuild), rdf::Term::string_literal(*s.time_of_rebuild));
  }
  return g;
}

namespace {

struct Decoration {
  std::vector<rdf::Triple> triples;
  std::string warning;
};

Decoration decorate_node(const RegistryState& r, const forge::ExecutableService& s, const rdf::Graph& input,
                         const rdf::Term& node) {
  Decoration d;
  if (!rdf::classify(input, node, s.description.input, *r.ontology)) {
    d.warning = node.key() + " is not an instance of " + s.description.input.canonical();
    return d;
  }
  try {
    d.triples = forge::decorate(s, *r.db, node);
  } catch (const forge::ParseFailure&) {
    d.warning = node.key() + " was not minted for table " + s.subject_function.table;
  }
  return d;
}

const forge::ExecutableService& callable(const RegistryState& r, std::string_view name) {
  const auto& s = r.get(name);
  if (!s.active()) throw ServiceInactive(std::string(name), s.inactive_reasons);
  if (!r.db || !r.ontology) throw ServiceInactive(std::string(name), {"no data source is loaded"});
  return s;
}

InvokeResult assemble(const rdf::Graph& input, std::vector<Decoration>& decorations) {
  InvokeResult result{input, {}};
  for (auto& d : decorations) {
    for (auto& t : d.triples) result.output.insert(std::move(t));
    if (!d.warning.empty()) result.warnings.push_back(std::move(d.warning));
  }
  return result;
}

}  // namespace

InvokeResult invoke(const RegistryState& r, std::string_view name, const rdf::Graph& input) {
  const auto& s = callable(r, name);
  std::vector<rdf::Term> nodes = input.subjects();
  if (s.description.is_all()) {
    std::vector<Decoration> once;
    if (!nodes.empty()) once.push_back({forge::decorate(s, *r.db, nodes.front()), {}});
    return assemble(input, once);
  }
  std::vector<Decoration> decorations(nodes.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      decorations[i] = decorate_node(r, s, input, nodes[i]);
    } catch (...) {
#pragma omp critical(semfed_invoke_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(input, decorations);
}

InvokeResult invoke_serial(const RegistryState& r, std::string_view name, const rdf::Graph& input) {
  const auto& s = callable(r, name);
  std::vector<rdf::Term> nodes = input.subjects();
  std::vector<Decoration> decorations;
  if (s.description.is_all()) {
    if (!nodes.empty()) decorations.push_back({forge::decorate(s, *r.db, nodes.front()), {}});
  } else {
    for (const auto& node : nodes) decorations.push_back(decorate_node(r, s, input, node));
  }
  return assemble(input, decorations);
}

}  // namespace semfed::runtime
