#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "farm/cache.hpp"
#include "farm/pipeline.hpp"
#include "farm/retrievers.hpp"

namespace farm {

// Everything the command line can configure. Flag values override config-file
// values, which override these defaults.
struct Settings {
  std::string model;
  std::string source = "credible";  // base | credible | wiki | none
  int snippets = 3;                 // top-n transform width
  int page_size = 10;
  int snippet_chars = 400;
  int fov_shots = 16;
  int rationale_shots = 0;  // 0: derive from source and snippet width
  int fov_samples = 0;
  int max_attempts = 5;
  int workers = 1;
  int limit = 0;
  std::string cache_dir;
  std::string out_dir = "out";
  std::string fov_bank = "data/foveation_bank.json";
  std::string rationale_bank = "data/rationale_bank.json";
  std::string fixtures;  // scripted-backend root (backend/ + retrieval/)
};

// Applies a JSON config object onto settings; unknown keys are rejected.
void apply_settings_json(Settings& settings, const nlohmann::json& config);

// Reads a JSON config file and applies it over the built-in defaults.
Settings load_settings(const std::filesystem::path& path);

// Maps the CLI source name to a kind; nullopt for "none" (the baseline).
std::optional<SourceKind> source_from_setting(const std::string& source);

// Translates settings into the pipeline run configuration.
RunConfig run_config_from_settings(const Settings& settings);

// Wired-up backend and retriever per the settings. A "mock:" model prefix
// selects the scripted backend, which requires `fixtures`. The caller owns
// the cache and must keep it alive alongside the bundle.
struct Wiring {
  std::unique_ptr<CompletionBackend> backend;   // outermost (maybe caching)
  std::unique_ptr<CompletionBackend> inner_backend;
  std::unique_ptr<Retriever> retriever;         // outermost (maybe caching)
  std::unique_ptr<Retriever> inner_retriever;
  std::string model_id;  // with any "mock:" prefix stripped
};

Wiring wire_up(const Settings& settings, FileCache* cache);

}  // namespace farm
