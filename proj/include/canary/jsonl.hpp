#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace canary {

/// `path` itself when it is a file, else its *.jsonl entries sorted by name.
/// A missing path yields nothing.
std::vector<std::filesystem::path> jsonl_files(const std::filesystem::path& path);

/// Calls `fn(line, line_number)` for each non-blank line.
void for_each_jsonl_line(const std::filesystem::path& file,
                         const std::function<void(std::string_view, std::size_t)>& fn);

/// Append-only writer shared by concurrent producers.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& file, bool truncate = false);
  void write(std::string_view line);

 private:
  std::mutex mu_;
  std::filesystem::path file_;
  std::ofstream out_;
};

}  // namespace canary
