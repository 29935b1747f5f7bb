#include "oldf/case_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oldf/log.hpp"

namespace oldf {

using nlohmann::json;

namespace {

// Shortest round-trip decimal representation, locale-independent.
std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError("case file: missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

int require_int(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw InputError("case file: missing or non-integer field '" + key + "'");
  return j[key].get<int>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Native JSON case
// ---------------------------------------------------------------------------

namespace {

CaseFile parse_single_phase(const json& root) {
  CaseFile c;
  c.version = root.value("version", 1);
  c.name = root.value("name", "");
  c.base_mva = require_number(root, "base_mva");
  if (c.base_mva <= 0) throw InputError("case file: base_mva must be positive");

  const double v_sub = root.value("substation_v_pu", 1.0);
  c.network.v0 = v_sub * v_sub;

  // Impedances arrive either in ohms (with base_kv) or directly per-unit.
  const std::string unit = root.value("impedance_unit", "pu");
  double z_base = 1.0;
  if (unit == "ohm") {
    const double kv = require_number(root, "base_kv");
    z_base = kv * kv / c.base_mva;
  } else if (unit != "pu") {
    throw InputError("case file: impedance_unit must be 'ohm' or 'pu'");
  }

  if (!root.contains("buses") || !root["buses"].is_array())
    throw InputError("case file: missing 'buses' array");
  if (!root.contains("branches") || !root["branches"].is_array())
    throw InputError("case file: missing 'branches' array");

  const auto& buses = root["buses"];
  c.network.bus_count = static_cast<int>(buses.size());
  std::vector<bool> seen(c.network.bus_count, false);
  Vec load_p = Vec::Zero(std::max(0, c.network.bus_count - 1));
  Vec load_q = load_p;
  for (const auto& bus : buses) {
    const int id = require_int(bus, "id");
    if (id < 0 || id >= c.network.bus_count)
      throw InputError("case file: bus id " + std::to_string(id) +
                       " outside dense range [0, " + std::to_string(c.network.bus_count - 1) + "]");
    if (seen[id]) throw InputError("case file: duplicate bus id " + std::to_string(id));
    seen[id] = true;
    const double pd = bus.value("pd_mw", 0.0);
    const double qd = bus.value("qd_mvar", 0.0);
    if (id == 0) {
      if (pd != 0 || qd != 0) throw InputError("case file: substation bus 0 cannot carry load");
      continue;
    }
    load_p[id - 1] = pd;
    load_q[id - 1] = qd;
  }

  for (const auto& jb : root["branches"]) {
    Branch b;
    b.id = require_int(jb, "id");
    b.from = require_int(jb, "from");
    b.to = require_int(jb, "to");
    if (b.from < 0 || b.from >= c.network.bus_count || b.to < 0 || b.to >= c.network.bus_count)
      throw InputError("case file: branch " + std::to_string(b.id) + " references bus " +
                       std::to_string(b.from < 0 || b.from >= c.network.bus_count ? b.from : b.to) +
                       " which does not exist");
    b.r = require_number(jb, "r") / z_base;
    b.x = require_number(jb, "x") / z_base;
    c.network.branches.push_back(b);
  }
  for (const auto& b : c.network.branches)
    for (const auto& other : c.network.branches)
      if (&b != &other && b.id == other.id)
        throw InputError("case file: duplicate branch id " + std::to_string(b.id));

  if (root.contains("switchable"))
    c.network.switchable_ids = root["switchable"].get<std::vector<int>>();
  if (root.contains("open"))
    for (int id : root["open"].get<std::vector<int>>()) c.network.open_ids.insert(id);
  for (int id : c.network.open_ids)
    if (!c.network.find_branch(id))
      throw InputError("case file: open list references unknown branch " + std::to_string(id));
  for (int id : c.network.switchable_ids)
    if (!c.network.find_branch(id))
      throw InputError("case file: switchable list references unknown branch " +
                       std::to_string(id));

  RadialCheck check = validate_radial(c.network);
  if (!check.ok) throw InputError("case file: closed branches are not radial: " + check.detail);
  c.network = oriented(c.network);

  // Positive consumption in the file becomes a negative net injection.
  c.base.p = -load_p / c.base_mva;
  c.base.q = -load_q / c.base_mva;
  return c;
}

CaseFile parse_three_phase(const json& root) {
  CaseFile c;
  c.three_phase = true;
  c.version = root.value("version", 1);
  c.name = root.value("name", "");
  c.base_mva = require_number(root, "base_mva");
  if (c.base_mva <= 0) throw InputError("case file: base_mva must be positive");

  const auto& buses = root["buses"];
  c.network3.bus_count = static_cast<int>(buses.size());
  c.network3.bus_phases.assign(c.network3.bus_count, 0);

  std::vector<Vec3> load_p(c.network3.bus_count, Vec3::Zero());
  std::vector<Vec3> load_q(c.network3.bus_count, Vec3::Zero());
  for (const auto& bus : buses) {
    const int id = require_int(bus, "id");
    if (id < 0 || id >= c.network3.bus_count)
      throw InputError("case file: bus id " + std::to_string(id) + " outside dense range");
    const PhaseMask mask = parse_phases(bus.value("phases", std::string("abc")));
    c.network3.bus_phases[id] = mask;
    auto read_per_phase = [&](const char* key, Vec3& out) {
      if (!bus.contains(key)) return;
      const auto& arr = bus[key];
      if (!arr.is_array() || arr.size() != static_cast<std::size_t>(phase_count(mask)))
        throw InputError("case file: bus " + std::to_string(id) + " field '" + key +
                         "' must list one value per present phase");
      int at = 0;
      for (int phi = 0; phi < 3; ++phi)
        if (has_phase(mask, phi)) out[phi] = arr[at++].get<double>();
    };
    read_per_phase("pd_mw", load_p[id]);
    read_per_phase("qd_mvar", load_q[id]);
    if (id == 0 && (!load_p[0].isZero() || !load_q[0].isZero()))
      throw InputError("case file: substation bus 0 cannot carry load");
  }

  if (root.contains("substation_v_pu")) {
    const auto& arr = root["substation_v_pu"];
    if (arr.is_number()) {
      const double v = arr.get<double>();
      c.network3.v0 = Vec3::Constant(v * v);
    } else {
      if (arr.size() != 3) throw InputError("case file: substation_v_pu must have 3 entries");
      for (int phi = 0; phi < 3; ++phi) {
        const double v = arr[phi].get<double>();
        c.network3.v0[phi] = v * v;
      }
    }
  }

  for (const auto& jb : root["branches"]) {
    Branch3 b;
    b.id = require_int(jb, "id");
    b.from = require_int(jb, "from");
    b.to = require_int(jb, "to");
    b.phases = parse_phases(jb.value("phases", std::string("abc")));
    b.z = Mat3c::Zero();
    const int k = phase_count(b.phases);
    auto read_block = [&](const char* key) {
      if (!jb.contains(key) || !jb[key].is_array() ||
          jb[key].size() != static_cast<std::size_t>(k))
        throw InputError("case file: branch " + std::to_string(b.id) + " field '" + key +
                         "' must be a " + std::to_string(k) + "x" + std::to_string(k) +
                         " matrix over its present phases");
      Mat3 block = Mat3::Zero();
      int row = 0;
      for (int phi = 0; phi < 3; ++phi) {
        if (!has_phase(b.phases, phi)) continue;
        const auto& jrow = jb[key][row];
        if (!jrow.is_array() || jrow.size() != static_cast<std::size_t>(k))
          throw InputError("case file: branch " + std::to_string(b.id) + " field '" + key +
                           "' row has wrong length");
        int col = 0;
        for (int psi = 0; psi < 3; ++psi) {
          if (!has_phase(b.phases, psi)) continue;
          block(phi, psi) = jrow[col++].get<double>();
        }
        ++row;
      }
      return block;
    };
    const Mat3 r = read_block("r");
    const Mat3 x = read_block("x");
    for (int phi = 0; phi < 3; ++phi)
      for (int psi = 0; psi < 3; ++psi) b.z(phi, psi) = Complex(r(phi, psi), x(phi, psi));
    c.network3.branches.push_back(b);
  }

  RadialCheck check = validate_radial3(c.network3);
  if (!check.ok) throw InputError("case file: " + check.detail);

  NetworkIndex3 index(c.network3);
  c.base3.p = Vec::Zero(index.stacked_size());
  c.base3.q = Vec::Zero(index.stacked_size());
  for (int bus = 1; bus < c.network3.bus_count; ++bus) {
    for (int phi = 0; phi < 3; ++phi) {
      const int off = index.stacked_offset(bus, phi);
      if (off < 0) continue;
      c.base3.p[off] = -load_p[bus][phi] / c.base_mva;
      c.base3.q[off] = -load_q[bus][phi] / c.base_mva;
    }
  }
  return c;
}

}  // namespace

CaseFile parse_case_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("case file: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("case file: top level must be an object");
  const std::string kind = root.value("kind", "single-phase");
  if (kind == "three-phase") return parse_three_phase(root);
  if (kind != "single-phase")
    throw InputError("case file: kind must be 'single-phase' or 'three-phase'");
  return parse_single_phase(root);
}

CaseFile load_case(const std::string& path) {
  CaseFile c = parse_case_json(read_file(path));
  if (c.name.empty()) c.name = path;
  return c;
}

std::string serialize_case_json(const CaseFile& c) {
  json root;
  root["version"] = c.version;
  root["kind"] = "single-phase";
  root["name"] = c.name;
  root["base_mva"] = c.base_mva;
  root["impedance_unit"] = "pu";
  root["substation_v_pu"] = std::sqrt(c.network.v0);
  json buses = json::array();
  for (int id = 0; id < c.network.bus_count; ++id) {
    json bus;
    bus["id"] = id;
    if (id > 0) {
      bus["pd_mw"] = -c.base.p[id - 1] * c.base_mva;
      bus["qd_mvar"] = -c.base.q[id - 1] * c.base_mva;
    }
    buses.push_back(bus);
  }
  root["buses"] = buses;
  json branches = json::array();
  for (const auto& b : c.network.branches) {
    json jb;
    jb["id"] = b.id;
    jb["from"] = b.from;
    jb["to"] = b.to;
    jb["r"] = b.r;
    jb["x"] = b.x;
    branches.push_back(jb);
  }
  root["branches"] = branches;
  root["switchable"] = c.network.switchable_ids;
  root["open"] = std::vector<int>(c.network.open_ids.begin(), c.network.open_ids.end());
  return root.dump(2);
}

// ---------------------------------------------------------------------------
// MATPOWER subset
// ---------------------------------------------------------------------------

namespace {

// Extracts the bracketed matrix following "mpc.<name> = [" as rows of doubles.
std::vector<std::vector<double>> matpower_matrix(const std::string& text,
                                                 const std::string& name) {
  const std::string key = "mpc." + name;
  std::size_t at = text.find(key);
  if (at == std::string::npos) throw InputError("matpower: missing " + key);
  at = text.find('[', at);
  const std::size_t end = text.find(']', at);
  if (at == std::string::npos || end == std::string::npos)
    throw InputError("matpower: unterminated matrix for " + key);

  std::vector<std::vector<double>> rows;
  std::string body = text.substr(at + 1, end - at - 1);
  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line, ';')) {
    // Strip comments and whitespace-only rows.
    const std::size_t comment = line.find('%');
    if (comment != std::string::npos) line = line.substr(0, comment);
    std::istringstream fields(line);
    std::vector<double> row;
    double value;
    while (fields >> value) row.push_back(value);
    if (!fields.eof())
      throw InputError("matpower: unparseable row in " + key + ": '" + line + "'");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

double matpower_scalar(const std::string& text, const std::string& name) {
  const std::string key = "mpc." + name;
  std::size_t at = text.find(key);
  if (at == std::string::npos) throw InputError("matpower: missing " + key);
  at = text.find('=', at);
  if (at == std::string::npos) throw InputError("matpower: malformed " + key);
  return std::strtod(text.c_str() + at + 1, nullptr);
}

}  // namespace

CaseFile parse_matpower_subset(const std::string& text) {
  CaseFile c;
  c.base_mva = matpower_scalar(text, "baseMVA");
  if (c.base_mva <= 0) throw InputError("matpower: baseMVA must be positive");

  const auto bus_rows = matpower_matrix(text, "bus");
  const auto branch_rows = matpower_matrix(text, "branch");

  // Bus columns: BUS_I TYPE PD QD ... ; type 3 marks the slack.
  int slack = -1;
  std::vector<int> ids;
  for (const auto& row : bus_rows) {
    if (row.size() < 4) throw InputError("matpower: bus row too short");
    const int id = static_cast<int>(row[0]);
    const int type = static_cast<int>(row[1]);
    ids.push_back(id);
    if (type == 3) {
      if (slack != -1) throw InputError("matpower: multiple slack buses (" +
                                        std::to_string(slack) + " and " + std::to_string(id) + ")");
      slack = id;
    }
  }
  if (slack == -1) throw InputError("matpower: no slack bus (type 3)");

  // Renumber: slack -> 0, everything else keeps file order.
  std::vector<int> order;
  order.push_back(slack);
  for (int id : ids)
    if (id != slack) order.push_back(id);
  auto dense_id = [&](int original) {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == original) return static_cast<int>(i);
    throw InputError("matpower: branch references unknown bus " + std::to_string(original));
  };

  c.network.bus_count = static_cast<int>(bus_rows.size());
  Vec load_p = Vec::Zero(c.network.bus_count - 1);
  Vec load_q = Vec::Zero(c.network.bus_count - 1);
  for (const auto& row : bus_rows) {
    const int dense = dense_id(static_cast<int>(row[0]));
    if (dense == 0) continue;
    load_p[dense - 1] = row[2];
    load_q[dense - 1] = row[3];
  }

  // Branch columns: F_BUS T_BUS R X B RATEA RATEB RATEC RATIO ANGLE STATUS.
  int next_id = 1;
  for (const auto& row : branch_rows) {
    if (row.size() < 4) throw InputError("matpower: branch row too short");
    Branch b;
    b.id = next_id++;
    b.from = dense_id(static_cast<int>(row[0]));
    b.to = dense_id(static_cast<int>(row[1]));
    b.r = row[2];
    b.x = row[3];
    const bool in_service = row.size() < 11 || row[10] != 0.0;
    c.network.branches.push_back(b);
    if (!in_service) {
      c.network.open_ids.insert(b.id);
      c.network.switchable_ids.push_back(b.id);
    }
  }
  if (text.find("mpc.gen") != std::string::npos)
    log_warn("matpower: generator data beyond the slack bus is ignored");

  RadialCheck check = validate_radial(c.network);
  if (!check.ok) throw InputError("matpower: in-service branches are not radial: " + check.detail);
  c.network = oriented(c.network);
  c.base.p = -load_p / c.base_mva;
  c.base.q = -load_q / c.base_mva;
  return c;
}

// ---------------------------------------------------------------------------
// Fingerprints
// ---------------------------------------------------------------------------

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

}  // namespace

std::string network_fingerprint(const RadialNetwork& network) {
  // Canonical form: oriented closed branches in id order, then the open set.
  NetworkIndex index(network);
  std::ostringstream canon;
  canon << "v1;n=" << network.bus_count << ";v0=" << fmt_double(network.v0) << ";";
  for (const auto& b : index.closed_branches())
    canon << b.id << "," << b.from << "," << b.to << "," << fmt_double(b.r) << ","
          << fmt_double(b.x) << ";";
  canon << "open=";
  for (int id : network.open_ids) canon << id << ",";
  return sha256_hex(canon.str());
}

std::string network_fingerprint3(const ThreePhaseNetwork& network) {
  NetworkIndex3 index(network);
  std::ostringstream canon;
  canon << "v1-3ph;n=" << network.bus_count << ";v0=" << fmt_double(network.v0[0]) << ","
        << fmt_double(network.v0[1]) << "," << fmt_double(network.v0[2]) << ";";
  for (int bus = 0; bus < network.bus_count; ++bus)
    canon << phase_string(network.bus_phases[bus]) << ";";
  for (const auto& b : index.branches()) {
    canon << b.id << "," << b.from << "," << b.to << "," << phase_string(b.phases) << ",";
    for (int phi = 0; phi < 3; ++phi)
      for (int psi = 0; psi < 3; ++psi)
        if (has_phase(b.phases, phi) && has_phase(b.phases, psi))
          canon << fmt_double(b.z(phi, psi).real()) << "," << fmt_double(b.z(phi, psi).imag())
                << ",";
    canon << ";";
  }
  return sha256_hex(canon.str());
}

// ---------------------------------------------------------------------------
// Parameter files
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec json_to_vec(const json& arr, const std::string& key) {
  if (!arr.is_array()) throw InputError("param file: field '" + key + "' must be an array");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[i] = arr[i].get<double>();
    if (!std::isfinite(v[i]))
      throw InputError("param file: field '" + key + "' contains a non-finite value");
  }
  return v;
}

json meta_to_json(const ParamFileMeta& meta) {
  json j;
  j["scenario_count"] = meta.scenario_count;
  j["seed"] = meta.seed;
  j["initial_loss"] = meta.initial_loss;
  j["final_loss"] = meta.final_loss;
  j["iterations"] = meta.iterations;
  return j;
}

ParamFileMeta meta_from_json(const json& j) {
  ParamFileMeta meta;
  meta.scenario_count = j.value("scenario_count", 0);
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.initial_loss = j.value("initial_loss", 0.0);
  meta.final_loss = j.value("final_loss", 0.0);
  meta.iterations = j.value("iterations", 0);
  return meta;
}

}  // namespace

std::string write_params_json(const RadialNetwork& network, const LdfParams& params,
                              const ParamFileMeta& meta) {
  json root;
  root["version"] = 1;
  root["kind"] = "ldf";
  root["fingerprint"] = network_fingerprint(network);
  root["params"]["dr"] = vec_to_json(params.dr);
  root["params"]["dx"] = vec_to_json(params.dx);
  root["params"]["gamma"] = vec_to_json(params.gamma);
  root["params"]["rho"] = vec_to_json(params.rho);
  root["params"]["varrho"] = vec_to_json(params.varrho);
  root["metadata"] = meta_to_json(meta);
  return root.dump(2);
}

LdfParams read_params_json(const std::string& text, const RadialNetwork& network,
                           ParamFileMeta* meta) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("param file: invalid JSON: ") + e.what());
  }
  if (root.value("kind", "") != "ldf")
    throw InputError("param file: expected kind 'ldf', got '" + root.value("kind", "") + "'");
  const std::string expected = network_fingerprint(network);
  const std::string actual = root.value("fingerprint", "");
  if (actual != expected)
    throw InputError("param file fingerprint mismatch: parameters were trained on a different "
                     "feeder or topology (file " + actual.substr(0, 12) + "..., network " +
                     expected.substr(0, 12) + "...)");
  const auto& p = root["params"];
  LdfParams params;
  params.dr = json_to_vec(p["dr"], "dr");
  params.dx = json_to_vec(p["dx"], "dx");
  params.gamma = json_to_vec(p["gamma"], "gamma");
  params.rho = json_to_vec(p["rho"], "rho");
  params.varrho = json_to_vec(p["varrho"], "varrho");
  NetworkIndex index(network);
  if (params.dr.size() != index.branch_count() ||
      params.gamma.size() != network.bus_count - 1)
    throw InputError("param file: vector lengths do not match the fingerprinted network");
  if (meta && root.contains("metadata")) *meta = meta_from_json(root["metadata"]);
  return params;
}

std::string write_params3_json(const ThreePhaseNetwork& network, const Ldf3Params& params,
                               const NetworkIndex3& index, const ParamFileMeta& meta) {
  json root;
  root["version"] = 1;
  root["kind"] = "ldf3";
  root["fingerprint"] = network_fingerprint3(network);
  root["params"]["packed"] = vec_to_json(params.pack(index));
  root["metadata"] = meta_to_json(meta);
  return root.dump(2);
}

Ldf3Params read_params3_json(const std::string& text, const ThreePhaseNetwork& network,
                             const NetworkIndex3& index, ParamFileMeta* meta) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("param file: invalid JSON: ") + e.what());
  }
  if (root.value("kind", "") != "ldf3")
    throw InputError("param file: expected kind 'ldf3', got '" + root.value("kind", "") + "'");
  const std::string expected = network_fingerprint3(network);
  if (root.value("fingerprint", "") != expected)
    throw InputError("param file fingerprint mismatch: parameters were trained on a different "
                     "feeder or topology");
  const Vec packed = json_to_vec(root["params"]["packed"], "packed");
  if (meta && root.contains("metadata")) *meta = meta_from_json(root["metadata"]);
  return Ldf3Params::unpack(packed, index);
}

// ---------------------------------------------------------------------------
// Scenario CSV
// ---------------------------------------------------------------------------

std::string write_scenarios_csv(const ScenarioSet& set) {
  std::ostringstream out;
  if (set.scenarios.empty()) return "";
  const Eigen::Index n = set.scenarios.front().p.size();
  for (Eigen::Index i = 0; i < n; ++i) out << "p_" << i + 1 << ",";
  for (Eigen::Index i = 0; i < n; ++i) out << "q_" << i + 1 << (i + 1 < n ? "," : "");
  out << "\n";
  for (const auto& sc : set.scenarios) {
    for (Eigen::Index i = 0; i < n; ++i) out << fmt_double(sc.p[i]) << ",";
    for (Eigen::Index i = 0; i < n; ++i) out << fmt_double(sc.q[i]) << (i + 1 < n ? "," : "");
    out << "\n";
  }
  return out.str();
}

ScenarioSet read_scenarios_csv(const std::string& text, Eigen::Index bus_count) {
  ScenarioSet set;
  set.family = ScenarioFamily::kFile;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    // Allow a header row.
    if (line_no == 1 && line.find("p_1") != std::string::npos) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw InputError("scenario csv line " + std::to_string(line_no) +
                         ": non-numeric field '" + field + "'");
      }
    }
    if (static_cast<Eigen::Index>(values.size()) != 2 * bus_count)
      throw InputError("scenario csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(2 * bus_count) + " columns, got " +
                       std::to_string(values.size()));
    InjectionScenario sc;
    sc.p = Eigen::Map<Vec>(values.data(), bus_count);
    sc.q = Eigen::Map<Vec>(values.data() + bus_count, bus_count);
    set.scenarios.push_back(std::move(sc));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
}

}  // namespace oldf
