#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "ars/io.hpp"

namespace test_support {

inline std::filesystem::path source_dir() { return ARS_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path toy_dir() { return data_dir() / "toy"; }

/// Fresh scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ars_test_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    ars::io::write_file(p, content);
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace test_support
