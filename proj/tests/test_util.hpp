#pragma once

#include <functional>
#include <string>

#include "catch_amalgamated.hpp"
#include "gforge/error.hpp"

inline std::string fixture(const std::string& name) {
  return std::string(GFORGE_FIXTURE_DIR) + "/" + name;
}

// code of the gforge::Error thrown by f; fails the test if nothing is thrown
inline gforge::Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const gforge::Error& e) {
    return e.code();
  }
  FAIL("no gforge::Error thrown");
  return gforge::Errc::InvalidArgument;
}
