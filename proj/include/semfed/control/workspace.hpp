#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semfed/change/change_manager.hpp"
#include "semfed/error.hpp"
#include "semfed/rdf/graph.hpp"

namespace semfed::control {

class WorkspaceError : public Error {
 public:
  explicit WorkspaceError(const std::string& message) : Error("WorkspaceError", message) {}
};

struct SourceVersion {
  std::filesystem::path schema;
  std::filesystem::path data;  // directory of `<table>.csv` files
  std::filesystem::path rules;
};

struct ScenarioConfig {
  // Clock readings for the change and for the rebuild.
  std::string change_time;
  std::string rebuild_time;
  // Saved query whose row count closes the transcript.
  std::string query;
};

// Paths are resolved against the directory of the workspace file.
struct WorkspaceConfig {
  std::filesystem::path file;
  SourceVersion sources;
  std::filesystem::path domain;
  std::filesystem::path services;
  std::optional<std::filesystem::path> queries;
  rdf::PrefixMap prefixes;
  std::string listen = "127.0.0.1:9999";

  // Later versions, in the order the scenario replay loads them.
  std::vector<std::filesystem::path> service_versions;
  std::vector<std::filesystem::path> domain_versions;
  std::vector<SourceVersion> source_versions;
  std::optional<ScenarioConfig> scenario;
};

// Throws WorkspaceError for malformed JSON, unknown keys or a referenced
// path that does not exist.
WorkspaceConfig load_workspace(const std::filesystem::path& file);

struct SavedQuerySpec {
  std::string name;
  // Query text; empty for questions with no query form.
  std::optional<std::string> text;
  std::string note;
};

// Names must be unique. Throws WorkspaceError.
std::vector<SavedQuerySpec> load_saved_queries(const WorkspaceConfig& config);

change::Sources load_sources(const WorkspaceConfig& config);
change::Sources load_sources(const SourceVersion& version, change::Sources base);

std::string read_text(const std::filesystem::path& path);

}  // namespace semfed::control
