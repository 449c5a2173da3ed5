#include "farm/cache.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "farm/canonical.hpp"
#include "farm/errors.hpp"

namespace farm {

namespace {
const char* namespace_dir(CacheNamespace ns) {
  return ns == CacheNamespace::Completion ? "completions" : "retrieval";
}
}  // namespace

FileCache::FileCache(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw Error(Errc::StoreUnavailable, "cannot create cache directory '" + root_.string() + "'");
  }
}

std::filesystem::path FileCache::entry_path(const CacheKey& key) const {
  // Two-character fan-out keeps directories small on large runs.
  const std::string shard = key.digest.size() >= 2 ? key.digest.substr(0, 2) : std::string("xx");
  return root_ / namespace_dir(key.ns) / shard / key.digest;
}

std::optional<std::string> FileCache::get(const CacheKey& key) {
  const auto path = entry_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  std::string header;
  if (!std::getline(in, header)) return std::nullopt;
  std::ostringstream payload_stream;
  payload_stream << in.rdbuf();
  std::string payload = payload_stream.str();
  in.close();

  // Header: "sha256:<hex> <size>"
  std::string expected_sum;
  std::size_t expected_size = 0;
  {
    std::istringstream hs(header);
    std::string sum_field, size_field;
    if (!(hs >> sum_field >> size_field) || sum_field.rfind("sha256:", 0) != 0) {
      std::filesystem::remove(path);
      return std::nullopt;
    }
    expected_sum = sum_field.substr(7);
    try {
      expected_size = static_cast<std::size_t>(std::stoull(size_field));
    } catch (const std::exception&) {
      std::filesystem::remove(path);
      return std::nullopt;
    }
  }

  if (payload.size() != expected_size || sha256_hex(payload) != expected_sum) {
    // Corrupt entry: evict and report a miss.
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return std::nullopt;
  }
  return payload;
}

void FileCache::put(const CacheKey& key, std::string_view value) {
  if (value.empty()) throw Error(Errc::StoreUnavailable, "refusing to store an empty entry");
  const auto path = entry_path(key);

  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(Errc::StoreUnavailable, "cannot create '" + path.parent_path().string() + "'");

  // Unique temp name per writer; rename is atomic within the directory.
  std::ostringstream tmp_name;
  tmp_name << "." << key.digest << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp_path = path.parent_path() / tmp_name.str();

  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::StoreUnavailable, "cannot open '" + tmp_path.string() + "' for writing");
    out << "sha256:" << sha256_hex(value) << ' ' << value.size() << '\n';
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
    out.flush();
    if (!out) throw Error(Errc::StoreUnavailable, "write failed for '" + tmp_path.string() + "'");
  }

  std::filesystem::rename(tmp_path, path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path);
    throw Error(Errc::StoreUnavailable, "rename failed for '" + path.string() + "'");
  }
}

}  // namespace farm
