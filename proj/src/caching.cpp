#include "farm/caching.hpp"

#include "farm/canonical.hpp"

namespace farm {

Completion CachingBackend::complete(const std::string& model_id, const std::string& prompt,
                                    const GenerationParams& params) {
  if (cache_ == nullptr) return inner_.complete(model_id, prompt, params);

  const CacheKey key{CacheNamespace::Completion,
                     completion_request_digest(model_id, prompt, params)};
  if (auto hit = cache_->get(key)) {
    return Completion::from_json(nlohmann::json::parse(*hit));
  }
  Completion fresh = inner_.complete(model_id, prompt, params);
  cache_->put(key, fresh.to_json().dump());
  return fresh;
}

}  // namespace farm
