#include "farm/settings.hpp"

#include <fstream>

#include "farm/caching.hpp"
#include "farm/errors.hpp"
#include "farm/http_backend.hpp"
#include "farm/mock_backend.hpp"

namespace farm {

using nlohmann::json;

void apply_settings_json(Settings& settings, const json& config) {
  if (!config.is_object()) throw Error(Errc::Config, "config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    try {
      if (key == "model") settings.model = value.get<std::string>();
      else if (key == "source") settings.source = value.get<std::string>();
      else if (key == "snippets") settings.snippets = value.get<int>();
      else if (key == "page_size") settings.page_size = value.get<int>();
      else if (key == "snippet_chars") settings.snippet_chars = value.get<int>();
      else if (key == "fov_shots") settings.fov_shots = value.get<int>();
      else if (key == "rationale_shots") settings.rationale_shots = value.get<int>();
      else if (key == "fov_samples") settings.fov_samples = value.get<int>();
      else if (key == "max_attempts") settings.max_attempts = value.get<int>();
      else if (key == "workers") settings.workers = value.get<int>();
      else if (key == "limit") settings.limit = value.get<int>();
      else if (key == "cache_dir") settings.cache_dir = value.get<std::string>();
      else if (key == "out_dir") settings.out_dir = value.get<std::string>();
      else if (key == "fov_bank") settings.fov_bank = value.get<std::string>();
      else if (key == "rationale_bank") settings.rationale_bank = value.get<std::string>();
      else if (key == "fixtures") settings.fixtures = value.get<std::string>();
      else throw Error(Errc::Config, "unknown config key: " + key);
    } catch (const json::exception& e) {
      throw Error(Errc::Config, "bad config value for \"" + key + "\": " + e.what());
    }
  }
}

Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open config file: " + path.string());
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw Error(Errc::Config, "bad config file " + path.string() + ": " + e.what());
  }
  Settings settings;
  apply_settings_json(settings, config);
  return settings;
}

std::optional<SourceKind> source_from_setting(const std::string& source) {
  if (source == "base") return SourceKind::WebBase;
  if (source == "credible") return SourceKind::WebCredible;
  if (source == "wiki") return SourceKind::Encyclopedia;
  if (source == "none") return std::nullopt;
  throw Error(Errc::Config, "source must be base, credible, wiki, or none; got " + source);
}

RunConfig run_config_from_settings(const Settings& settings) {
  RunConfig config;
  config.model_id = settings.model.rfind("mock:", 0) == 0 ? settings.model.substr(5)
                                                          : settings.model;
  if (auto kind = source_from_setting(settings.source)) {
    RetrieverConfig retriever;
    retriever.source_kind = *kind;
    retriever.transform_n = settings.snippets;
    retriever.result_page_size = settings.page_size;
    retriever.snippet_char_budget = settings.snippet_chars;
    config.retriever = retriever;
  }
  config.foveation_shot_count = settings.fov_shots;
  config.rationale_shot_count = settings.rationale_shots;
  config.fov_samples = settings.fov_samples;
  config.max_foveation_attempts = settings.max_attempts;
  config.workers = settings.workers;
  config.limit = settings.limit;
  config.output_dir = settings.out_dir;
  return config;
}

Wiring wire_up(const Settings& settings, FileCache* cache) {
  Wiring wiring;
  if (settings.model.empty()) throw Error(Errc::Config, "no model configured; pass --model");

  bool mock = settings.model.rfind("mock:", 0) == 0;
  wiring.model_id = mock ? settings.model.substr(5) : settings.model;
  if (mock) {
    if (settings.fixtures.empty()) {
      throw Error(Errc::Config, "mock models need --fixtures pointing at scripted responses");
    }
    wiring.inner_backend =
        std::make_unique<MockBackend>(std::filesystem::path(settings.fixtures) / "backend");
  } else {
    wiring.inner_backend = std::make_unique<HttpBackend>(HttpBackendConfig{});
  }
  if (cache != nullptr) {
    wiring.backend = std::make_unique<CachingBackend>(*wiring.inner_backend, cache);
  } else {
    wiring.backend = std::move(wiring.inner_backend);
  }

  auto kind = source_from_setting(settings.source);
  if (kind) {
    std::string service = retrieval_service_name(*kind);
    if (mock) {
      wiring.inner_retriever = std::make_unique<FixtureRetriever>(
          service, std::filesystem::path(settings.fixtures) / "retrieval");
    } else if (*kind == SourceKind::Encyclopedia) {
      wiring.inner_retriever = std::make_unique<WikipediaRetriever>(WikipediaConfig{});
    } else {
      wiring.inner_retriever = std::make_unique<WebSearchRetriever>(WebSearchConfig{});
    }
    if (cache != nullptr) {
      wiring.retriever = std::make_unique<CachingRetriever>(*wiring.inner_retriever, service, cache);
    } else {
      wiring.retriever = std::move(wiring.inner_retriever);
    }
  }
  return wiring;
}

}  // namespace farm
