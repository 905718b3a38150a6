#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cmsgd/objectives.hpp"
#include "cmsgd/types.hpp"

namespace test {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("cmsgd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline std::shared_ptr<const cmsgd::QuadraticObjective> quadratic(const cmsgd::Matrix& a,
                                                                  const cmsgd::Vector& b,
                                                                  double noise = 0.0) {
  return std::make_shared<cmsgd::QuadraticObjective>(a, b, noise);
}

inline std::shared_ptr<const cmsgd::QuadraticObjective> zero_objective(std::size_t d) {
  return quadratic(cmsgd::Matrix::Zero(d, d), cmsgd::Vector::Zero(d));
}

}  // namespace test
