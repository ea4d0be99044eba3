#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "nlint/errors.hpp"

#define CHECK_FAILS_WITH(expr, expected_kind)                        \
  do {                                                               \
    bool nlint_thrown_ = false;                                      \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const nlint::Error& nlint_e_) {                         \
      nlint_thrown_ = true;                                          \
      CHECK_MESSAGE(nlint_e_.kind() == (expected_kind), nlint_e_.what()); \
    }                                                                \
    CHECK_MESSAGE(nlint_thrown_, "expected an nlint::Error");        \
  } while (false)

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nlint-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
