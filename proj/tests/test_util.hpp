#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include "farm/errors.hpp"

namespace testutil {

// Error code raised by the callable, or nullopt when it returns normally.
template <typename Fn>
std::optional<farm::Errc> code_of(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const farm::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Unique scratch directory, removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() / ("farm_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::filesystem::path fixtures_dir() { return FARM_TEST_DATA_DIR; }
inline std::filesystem::path data_dir() { return FARM_DATA_DIR; }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
