#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace quip::fs {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target so readers
// never observe a partial file. Missing parent directories are an IoError.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

// Exclusive advisory lock on `<path>.lock`, held for the object's lifetime.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path);
  ~FileLock();
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace quip::fs
