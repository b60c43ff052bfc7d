#pragma once

#include "mobman/error.hpp"
#include "mobman/io.hpp"

#include <doctest.h>

#include <random>
#include <string>

#ifndef MOBMAN_DATA_DIR
#error "MOBMAN_DATA_DIR must point at the repository data directory"
#endif

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(MOBMAN_DATA_DIR) + "/" + rel; }
inline std::string data_file(const std::string& rel) { return mobman::read_text_file(data_path(rel)); }

// Error code raised by f, or 0 when it returns normally.
template <class F>
int error_code_of(F&& f) {
  try {
    f();
  } catch (const mobman::Error& e) {
    return static_cast<int>(e.code());
  }
  return 0;
}

inline double urand(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace testing

#define CHECK_ERROR(expr, code) CHECK(::testing::error_code_of([&] { (void)(expr); }) == static_cast<int>(code))
#define REQUIRE_ERROR(expr, code) REQUIRE(::testing::error_code_of([&] { (void)(expr); }) == static_cast<int>(code))
