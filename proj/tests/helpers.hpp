#pragma once

#include <functional>
#include <string>

#include "doctest.h"
#include "errors.hpp"

#include "level.hpp"

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(LEVELREPAIR_DATA_DIR) + "/" + rel; }

inline const levelrepair::GameConfig& zelda() {
  static const auto config = levelrepair::load_config(data_path("zelda/zelda.cfg"));
  return config;
}

inline const levelrepair::GameConfig& pacman() {
  static const auto config = levelrepair::load_config(data_path("pacman/pacman.cfg"));
  return config;
}

inline int type_of(const levelrepair::GameConfig& config, const char* name) { return *config.type_by_name(name); }

// Code of the levelrepair::Error thrown by fn.
inline levelrepair::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const levelrepair::Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return levelrepair::ErrorCode::kInvalidArgument;
}

}  // namespace testing
