#pragma once

#include <string>
#include <string_view>

#include "farm/backend.hpp"

namespace farm {

// SHA-256 of the input, lowercase hex.
std::string sha256_hex(std::string_view data);

// Canonical serializations used for cache keys and mock-backend scripts:
// JSON with sorted keys and no insignificant whitespace, so identical requests
// always produce identical digests.
std::string canonical_completion_request(const std::string& model_id, const std::string& prompt,
                                         const GenerationParams& params);

std::string canonical_retrieval_request(const std::string& service, const std::string& query,
                                        int page_size);

std::string completion_request_digest(const std::string& model_id, const std::string& prompt,
                                      const GenerationParams& params);

std::string retrieval_request_digest(const std::string& service, const std::string& query,
                                     int page_size);

}  // namespace farm
