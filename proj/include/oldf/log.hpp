#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace oldf {

// Verbosity from OLDF_LOG: 0/absent = warnings only, 1 = info, 2 = debug.
inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("OLDF_LOG");
    if (!env) return 0;
    return std::atoi(env);
  }();
  return level;
}

inline void log_warn(const std::string& msg) { std::cerr << "[oldf] warning: " << msg << "\n"; }

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[oldf] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[oldf] debug: " << msg << "\n";
}

}  // namespace oldf
