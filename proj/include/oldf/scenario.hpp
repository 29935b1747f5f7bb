#pragma once

#include <string>
#include <vector>

#include "oldf/types.hpp"

namespace oldf {

// Net active/reactive injections for non-substation buses, p.u. on the
// system base. Loads appear as negative entries. Index is bus-1.
struct InjectionScenario {
  Vec p;
  Vec q;
};

// Stacked per-(bus, phase) net injections in the NetworkIndex3 layout.
struct InjectionScenario3 {
  Vec p;
  Vec q;
};

enum class ScenarioFamily { kBaseScaledNormal, kHighLoadGrid, kUniformRandom, kFile };

inline const char* to_string(ScenarioFamily family) {
  switch (family) {
    case ScenarioFamily::kBaseScaledNormal: return "base-scaled-normal";
    case ScenarioFamily::kHighLoadGrid: return "high-load-grid";
    case ScenarioFamily::kUniformRandom: return "uniform-random";
    case ScenarioFamily::kFile: return "file";
  }
  return "unknown";
}

struct ScenarioSet {
  std::vector<InjectionScenario> scenarios;
  ScenarioFamily family = ScenarioFamily::kFile;
  std::uint64_t seed = 0;

  std::size_t size() const { return scenarios.size(); }
};

struct ScenarioSet3 {
  std::vector<InjectionScenario3> scenarios;
  ScenarioFamily family = ScenarioFamily::kFile;
  std::uint64_t seed = 0;

  std::size_t size() const { return scenarios.size(); }
};

}  // namespace oldf
