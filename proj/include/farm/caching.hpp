#pragma once

#include "farm/backend.hpp"
#include "farm/cache.hpp"

namespace farm {

// Wraps any backend with the content-addressed cache. A null cache degrades
// to a transparent pass-through.
class CachingBackend : public CompletionBackend {
 public:
  CachingBackend(CompletionBackend& inner, FileCache* cache) : inner_(inner), cache_(cache) {}

  Completion complete(const std::string& model_id, const std::string& prompt,
                      const GenerationParams& params) override;

  int context_budget(const std::string& model_id) const override {
    return inner_.context_budget(model_id);
  }

 private:
  CompletionBackend& inner_;
  FileCache* cache_;
};

}  // namespace farm
