#include "canary/jsonl.hpp"

#include <algorithm>

#include "canary/error.hpp"

namespace canary {

std::vector<std::filesystem::path> jsonl_files(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_regular_file(path)) {
    files.push_back(path);
  } else if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  }
  return files;
}

void for_each_jsonl_line(const std::filesystem::path& file,
                         const std::function<void(std::string_view, std::size_t)>& fn) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read " + file.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, n);
  }
}

JsonlWriter::JsonlWriter(const std::filesystem::path& file, bool truncate) : file_(file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  out_.open(file, (truncate ? std::ios::trunc : std::ios::app) | std::ios::binary | std::ios::out);
  if (!out_) throw Error("cannot open " + file.string() + " for writing");
}

void JsonlWriter::write(std::string_view line) {
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("write to " + file_.string() + " failed");
}

}  // namespace canary
