#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace farm {

enum class CacheNamespace { Completion, Retrieval };

struct CacheKey {
  CacheNamespace ns = CacheNamespace::Completion;
  std::string digest;  // stable hash of the canonicalized request
};

// Content-addressed file-per-entry cache. Entries carry a checksum header;
// corrupted entries read as misses and are evicted. Writes go through a temp
// file plus rename, so concurrent readers never observe partial entries.
class FileCache {
 public:
  // Creates the root directory if needed; throws StoreUnavailable on failure.
  explicit FileCache(std::filesystem::path root);

  // Stored bytes if present and checksum-valid, otherwise nullopt.
  std::optional<std::string> get(const CacheKey& key);

  // Atomic write; value must be non-empty.
  void put(const CacheKey& key, std::string_view value);

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path entry_path(const CacheKey& key) const;

 private:
  std::filesystem::path root_;
};

}  // namespace farm
