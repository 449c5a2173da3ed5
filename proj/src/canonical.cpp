#include "farm/canonical.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace farm {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string canonical_completion_request(const std::string& model_id, const std::string& prompt,
                                         const GenerationParams& params) {
  // nlohmann::json objects are key-sorted maps; dump() emits no extra
  // whitespace, so this is already canonical.
  nlohmann::json j{
      {"kind", "completion"},
      {"model_id", model_id},
      {"prompt", prompt},
      {"params", params.to_json()},
  };
  return j.dump();
}

std::string canonical_retrieval_request(const std::string& service, const std::string& query,
                                        int page_size) {
  nlohmann::json j{
      {"kind", "retrieval"},
      {"service", service},
      {"query", query},
      {"page_size", page_size},
  };
  return j.dump();
}

std::string completion_request_digest(const std::string& model_id, const std::string& prompt,
                                      const GenerationParams& params) {
  return sha256_hex(canonical_completion_request(model_id, prompt, params));
}

std::string retrieval_request_digest(const std::string& service, const std::string& query,
                                     int page_size) {
  return sha256_hex(canonical_retrieval_request(service, query, page_size));
}

}  // namespace farm
