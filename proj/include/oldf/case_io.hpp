#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oldf/lindistflow.hpp"
#include "oldf/network.hpp"
#include "oldf/scenario.hpp"
#include "oldf/training.hpp"
#include "oldf/types.hpp"

namespace oldf {

// A parsed feeder case: network plus base loads, everything already in
// per-unit on `base_mva`. Loads are stored as positive consumption in the
// files and negated into net injections here.
struct CaseFile {
  int version = 1;
  std::string name;
  double base_mva = 100.0;
  bool three_phase = false;

  RadialNetwork network;          // single-phase payload
  InjectionScenario base;         // net injections, p.u.

  ThreePhaseNetwork network3;     // three-phase payload
  InjectionScenario3 base3;       // stacked net injections, p.u.
};

// Parses the native case JSON (schema v1, see README). Throws InputError
// with field context on schema or semantic violations.
CaseFile parse_case_json(const std::string& text);
CaseFile load_case(const std::string& path);

// Serializes a single-phase case back to schema v1 JSON (per-unit
// impedances). parse(serialize(c)) reproduces the case.
std::string serialize_case_json(const CaseFile& c);

// Minimal MATPOWER reader: baseMVA plus the bus and branch matrices.
// Branch r/x are taken as already per-unit; the status column is respected
// (status 0 loads the branch as open). Generators other than the slack are
// ignored with a warning.
CaseFile parse_matpower_subset(const std::string& text);

// ---------------------------------------------------------------------------
// Trained parameter files
// ---------------------------------------------------------------------------

// SHA-256 over the canonicalized topology + impedance list. Any change to
// ids, orientation, impedances, or the open set changes the fingerprint.
std::string network_fingerprint(const RadialNetwork& network);
std::string network_fingerprint3(const ThreePhaseNetwork& network);

struct ParamFileMeta {
  int scenario_count = 0;
  std::uint64_t seed = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
};

std::string write_params_json(const RadialNetwork& network, const LdfParams& params,
                              const ParamFileMeta& meta);
std::string write_params3_json(const ThreePhaseNetwork& network, const Ldf3Params& params,
                               const NetworkIndex3& index, const ParamFileMeta& meta);

// Reading verifies the fingerprint against the supplied network and fails
// hard on mismatch: silently applying parameters trained on a different
// feeder or topology is the failure mode this guards against.
LdfParams read_params_json(const std::string& text, const RadialNetwork& network,
                           ParamFileMeta* meta = nullptr);
Ldf3Params read_params3_json(const std::string& text, const ThreePhaseNetwork& network,
                             const NetworkIndex3& index, ParamFileMeta* meta = nullptr);

// ---------------------------------------------------------------------------
// Scenario CSV: one row per scenario, columns p_1..p_n,q_1..q_n in p.u.
// ---------------------------------------------------------------------------

std::string write_scenarios_csv(const ScenarioSet& set);
ScenarioSet read_scenarios_csv(const std::string& text, Eigen::Index bus_count);

// Small file helpers shared by the tools.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace oldf
