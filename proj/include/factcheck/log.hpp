#pragma once

#include <iostream>
#include <string_view>

namespace fc::log {

enum class Level { kQuiet = 0, kWarn = 1, kInfo = 2 };

inline Level& level() {
  static Level lvl = Level::kWarn;
  return lvl;
}

inline void warn(std::string_view msg) {
  if (level() >= Level::kWarn) std::cerr << "warning: " << msg << '\n';
}

inline void info(std::string_view msg) {
  if (level() >= Level::kInfo) std::cerr << msg << '\n';
}

}  // namespace fc::log
