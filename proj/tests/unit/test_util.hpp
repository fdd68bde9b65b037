#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "canary/builtin_spaces.hpp"
#include "canary/token_store.hpp"

namespace testutil {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("canary-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline void register_builtins(canary::TokenStore& store) {
  for (const auto& spec : canary::builtin_space_specs()) store.register_space(canary::build_value_space(spec));
}

inline std::map<int, std::string> uniform_slots(const std::string& space) {
  std::map<int, std::string> m;
  for (int s = 1; s <= canary::kSlotsPerSite; ++s) m[s] = space;
  return m;
}

inline std::map<int, std::string> default_slots() {
  return {{1, "given-name"}, {2, "surname"}, {3, "place-name"}, {4, "place-name"}, {5, "org-name"},
          {6, "title"},      {7, "title"},   {8, "number"},     {9, "date"},       {10, "phone"}};
}

inline std::string source_dir() { return CANARY_SOURCE_DIR; }

}  // namespace testutil
