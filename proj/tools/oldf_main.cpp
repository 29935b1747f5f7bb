// Batch front door: pf / train / eval / topo / hosting subcommands wiring
// feeder files to solver runs, trained parameter files and report CSVs.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oldf/case_io.hpp"
#include "oldf/distflow.hpp"
#include "oldf/evaluation.hpp"
#include "oldf/hosting.hpp"
#include "oldf/log.hpp"
#include "oldf/parallel.hpp"
#include "oldf/training.hpp"
#include "oldf/types.hpp"

namespace fs = std::filesystem;
using namespace oldf;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

struct CommonOpts {
  std::string case_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::size_t jobs = 0;  // 0 = available parallelism
  bool strict = false;
};

std::size_t effective_jobs(const CommonOpts& opts) {
  return opts.jobs == 0 ? default_jobs() : opts.jobs;
}

CaseFile load_any_case(const std::string& path) {
  if (path.size() > 2 && path.substr(path.size() - 2) == ".m")
    return parse_matpower_subset(read_file(path));
  CaseFile c = parse_case_json(read_file(path));
  if (c.name.empty()) c.name = path;
  return c;
}

void write_manifest(const CommonOpts& opts, const std::string& subcommand, const CaseFile& c,
                    json extra) {
  json manifest;
  manifest["tool"] = "oldf";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["case"] = opts.case_path;
  manifest["case_fingerprint"] =
      c.three_phase ? network_fingerprint3(c.network3) : network_fingerprint(c.network);
  manifest["seed"] = opts.seed;
  manifest["jobs"] = effective_jobs(opts);
  manifest["options"] = std::move(extra);
  write_file((fs::path(opts.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

std::string pf_csv(const NetworkIndex& index, const PfSolution& sol) {
  std::ostringstream out;
  out << "record,id,from,to,v_pu2,vm_pu,P_pu,Q_pu,ell_pu2\n";
  for (int bus = 0; bus < index.bus_count(); ++bus)
    out << "bus," << bus << ",,," << sol.v[bus] << "," << std::sqrt(sol.v[bus]) << ",,,\n";
  for (int s = 0; s < index.branch_count(); ++s) {
    const Branch& b = index.closed_branches()[s];
    out << "branch," << b.id << "," << b.from << "," << b.to << ",,," << sol.flow_p[s] << ","
        << sol.flow_q[s] << "," << sol.ell[s] << "\n";
  }
  return out.str();
}

std::string pf3_csv(const NetworkIndex3& index, const PfSolution3& sol) {
  std::ostringstream out;
  out << "record,bus,phase,v_pu2,vm_pu,Vre,Vim\n";
  for (int bus = 1; bus < index.bus_count(); ++bus) {
    for (int phi = 0; phi < 3; ++phi) {
      const int off = index.stacked_offset(bus, phi);
      if (off < 0) continue;
      out << "bus," << bus << "," << phase_string(1 << phi) << "," << sol.v[off] << ","
          << std::sqrt(sol.v[off]) << "," << sol.phasors[bus][phi].real() << ","
          << sol.phasors[bus][phi].imag() << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// pf
// ---------------------------------------------------------------------------

int cmd_pf(const CommonOpts& opts, const std::string& scenario_path) {
  CaseFile c = load_any_case(opts.case_path);
  fs::create_directories(opts.out_dir);

  if (c.three_phase) {
    NetworkIndex3 index(c.network3);
    PfSolution3 sol = solve_distflow3(index, c.base3);
    if (!sol.converged) {
      std::cerr << "power flow did not converge (residual " << sol.residual << ")\n";
      return kExitNumerical;
    }
    write_file((fs::path(opts.out_dir) / "pf_000.csv").string(), pf3_csv(index, sol));
    std::cout << "converged in " << sol.iterations << " iterations, residual " << sol.residual
              << ", |V| range [" << std::sqrt(sol.v.minCoeff()) << ", "
              << std::sqrt(sol.v.maxCoeff()) << "] p.u.\n";
    write_manifest(opts, "pf", c, json{{"scenario", scenario_path}});
    return kExitOk;
  }

  NetworkIndex index(c.network);
  ScenarioSet set;
  if (scenario_path.empty()) {
    set.scenarios.push_back(c.base);
  } else {
    set = read_scenarios_csv(read_file(scenario_path), c.network.bus_count - 1);
  }
  int failures = 0;
  std::vector<PfSolution> sols(set.size());
  parallel_for(set.size(), effective_jobs(opts), [&](std::size_t m) {
    sols[m] = solve_distflow(index, set.scenarios[m], c.network.v0);
  });
  for (std::size_t m = 0; m < set.size(); ++m) {
    const PfSolution& sol = sols[m];
    std::ostringstream name;
    name << "pf_" << std::setw(3) << std::setfill('0') << m << ".csv";
    write_file((fs::path(opts.out_dir) / name.str()).string(), pf_csv(index, sol));
    if (!sol.converged) ++failures;
    std::cout << "scenario " << m << ": " << (sol.converged ? "converged" : "NOT CONVERGED")
              << " in " << sol.iterations << " iterations, residual " << sol.residual
              << ", |V| range [" << std::sqrt(sol.v.tail(sol.v.size() - 1).minCoeff()) << ", "
              << std::sqrt(sol.v.tail(sol.v.size() - 1).maxCoeff()) << "] p.u.\n";
  }
  write_manifest(opts, "pf", c, json{{"scenario", scenario_path}, {"count", set.size()}});
  return failures == 0 ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

json report_json(const TrainReport& report) {
  return json{{"initial_loss", report.initial_loss},
              {"final_loss", report.final_loss},
              {"iterations", report.iterations},
              {"grad_norm", report.grad_norm},
              {"wall_time_s", report.wall_time_s},
              {"dropped_scenarios", report.dropped_scenarios},
              {"exit_reason", report.exit_reason}};
}

int cmd_train(const CommonOpts& opts, int scenarios, double std_dev, bool include_highload,
              double tol, int max_iter) {
  CaseFile c = load_any_case(opts.case_path);
  fs::create_directories(opts.out_dir);
  TrainOptions topts;
  topts.grad_tol = tol;
  topts.max_iter = max_iter;
  topts.jobs = effective_jobs(opts);
  TrainReport report;

  if (c.three_phase) {
    NetworkIndex3 index(c.network3);
    ScenarioSet3 set = sample_training_scenarios3(index, c.base3, scenarios, opts.seed, std_dev);
    Ldf3Params params = train3(index, set, topts, &report);
    ParamFileMeta meta{scenarios, opts.seed, report.initial_loss, report.final_loss,
                       report.iterations};
    write_file((fs::path(opts.out_dir) / "params.json").string(),
               write_params3_json(c.network3, params, index, meta) + "\n");
  } else {
    NetworkIndex index(c.network);
    ScenarioSet set = sample_training_scenarios(c.base, scenarios, opts.seed, std_dev);
    if (include_highload) {
      ScenarioSet high = sample_highload_scenarios(c.base);
      for (auto& sc : high.scenarios) set.scenarios.push_back(std::move(sc));
    }
    LdfParams params = train(index, set, c.network.v0, topts, &report);
    ParamFileMeta meta{static_cast<int>(set.size()), opts.seed, report.initial_loss,
                       report.final_loss, report.iterations};
    write_file((fs::path(opts.out_dir) / "params.json").string(),
               write_params_json(c.network, params, meta) + "\n");

    // Raw nominal-vs-optimized dumps for external distribution plots.
    std::ostringstream branches;
    branches << "branch,r_nominal,dr_opt,x_nominal,dx_opt\n";
    for (int s = 0; s < index.branch_count(); ++s) {
      const Branch& b = index.closed_branches()[s];
      branches << b.id << "," << b.r << "," << params.dr[s] << "," << b.x << ","
               << params.dx[s] << "\n";
    }
    write_file((fs::path(opts.out_dir) / "params_branches.csv").string(), branches.str());
    std::ostringstream biases;
    biases << "bus,gamma,rho,varrho\n";
    for (int bus = 1; bus < c.network.bus_count; ++bus)
      biases << bus << "," << params.gamma[bus - 1] << "," << params.rho[bus - 1] << ","
             << params.varrho[bus - 1] << "\n";
    write_file((fs::path(opts.out_dir) / "params_biases.csv").string(), biases.str());
  }

  write_file((fs::path(opts.out_dir) / "report.json").string(), report_json(report).dump(2) + "\n");
  write_manifest(opts, "train", c,
                 json{{"scenarios", scenarios},
                      {"std", std_dev},
                      {"include_highload", include_highload},
                      {"tol", tol},
                      {"max_iter", max_iter}});
  std::cout << "loss " << report.initial_loss << " -> " << report.final_loss << " after "
            << report.iterations << " iterations (" << report.exit_reason << "), "
            << report.dropped_scenarios << " scenarios dropped\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

std::string comparison_csv(const ModelComparison& cmp) {
  std::ostringstream out;
  out << "model,eps_avg,eps_max,worst_bus,worst_scenario,scenarios_used,scenarios_dropped\n";
  const auto row = [&](const char* name, const ErrorReport& r) {
    out << name << "," << r.eps_avg << "," << r.eps_max << "," << r.worst_bus << ","
        << r.worst_scenario << "," << r.scenarios_used << "," << r.scenarios_dropped << "\n";
  };
  row("ldf", cmp.ldf);
  row("oldf", cmp.oldf);
  return out.str();
}

int cmd_eval(const CommonOpts& opts, const std::string& params_path, const std::string& family,
             int count, double lo, double hi) {
  CaseFile c = load_any_case(opts.case_path);
  fs::create_directories(opts.out_dir);

  ModelComparison cmp;
  if (c.three_phase) {
    NetworkIndex3 index(c.network3);
    Ldf3Params params = read_params3_json(read_file(params_path), c.network3, index);
    ScenarioSet3 set;
    if (family == "base") {
      set.scenarios.push_back(c.base3);
    } else if (family == "high") {
      for (int sign = -1; sign <= 1; sign += 2)
        for (int k = 0; k <= 14; ++k) {
          const double f = sign * (1.0 + k / 14.0);
          set.scenarios.push_back({f * c.base3.p, f * c.base3.q});
        }
    } else if (family == "random") {
      set = sample_uniform_scenarios3(index, c.base3, count, lo, hi, opts.seed);
    } else {
      std::cerr << "unknown family '" << family << "'\n";
      return kExitInput;
    }
    cmp = compare_models3(index, params, set, effective_jobs(opts));
  } else {
    NetworkIndex index(c.network);
    LdfParams params = read_params_json(read_file(params_path), c.network);
    ScenarioSet set;
    if (family == "base") {
      set.scenarios.push_back(c.base);
    } else if (family == "high") {
      set = sample_highload_scenarios(c.base);
    } else if (family == "random") {
      set = sample_uniform_scenarios(c.base, count, lo, hi, opts.seed);
    } else {
      std::cerr << "unknown family '" << family << "'\n";
      return kExitInput;
    }
    cmp = compare_models(index, params, set, c.network.v0, effective_jobs(opts));
  }

  write_file((fs::path(opts.out_dir) / "eval_table.csv").string(), comparison_csv(cmp));
  write_manifest(opts, "eval", c,
                 json{{"params", params_path},
                      {"family", family},
                      {"count", count},
                      {"lo", lo},
                      {"hi", hi}});
  std::cout << comparison_csv(cmp);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// topo
// ---------------------------------------------------------------------------

int cmd_topo(const CommonOpts& opts, const std::string& switches_path, int test_count,
             std::uint64_t test_seed, int train_scenarios, std::uint64_t train_seed) {
  CaseFile c = load_any_case(opts.case_path);
  if (c.three_phase) {
    std::cerr << "topology studies run on single-phase cases\n";
    return kExitInput;
  }
  fs::create_directories(opts.out_dir);

  std::vector<TopologyConfig> configs;
  if (switches_path.empty()) {
    configs = enumerate_radial_configs(c.network);
  } else {
    const json root = json::parse(read_file(switches_path));
    for (const auto& jc : root.at("configs")) {
      TopologyConfig cfg;
      for (int id : jc.value("open", std::vector<int>{})) cfg.open_ids.insert(id);
      for (int id : jc.value("close", std::vector<int>{})) cfg.closed_ids.insert(id);
      configs.push_back(std::move(cfg));
    }
  }
  std::cout << configs.size() << " topologies\n";

  SweepOptions sopts;
  sopts.test_count = test_count;
  sopts.test_seed = test_seed;
  sopts.train_count = train_scenarios;
  sopts.train_seed = train_seed;
  sopts.jobs = effective_jobs(opts);
  TopologyMatrix m = topology_sweep(c.network, c.base, configs, sopts);

  write_file((fs::path(opts.out_dir) / "topology_matrix.csv").string(), topology_matrix_csv(m));
  write_file((fs::path(opts.out_dir) / "topology_long.csv").string(), topology_long_csv(m));
  write_file((fs::path(opts.out_dir) / "dominance.csv").string(), dominance_csv(m));
  std::ostringstream baseline;
  baseline << "topology,eps_avg_ldf\n";
  for (int j = 0; j < m.baseline.size(); ++j) baseline << j + 1 << "," << m.baseline[j] << "\n";
  write_file((fs::path(opts.out_dir) / "topology_baseline.csv").string(), baseline.str());
  write_manifest(opts, "topo", c,
                 json{{"switches", switches_path},
                      {"topologies", configs.size()},
                      {"test_count", test_count},
                      {"test_seed", test_seed},
                      {"train_scenarios", train_scenarios},
                      {"train_seed", train_seed}});

  bool diagonal_ok = true;
  for (int i = 0; i < m.eps_avg.rows(); ++i) {
    const bool failed_row =
        std::find(m.failed_rows.begin(), m.failed_rows.end(), i) != m.failed_rows.end();
    if (!failed_row && !m.dominates(i, i)) diagonal_ok = false;
  }
  std::cout << "dominance diagonal " << (diagonal_ok ? "all-true" : "VIOLATED") << ", "
            << m.failed_rows.size() << " training failures\n";
  if (opts.strict && !diagonal_ok) return kExitNumerical;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// hosting
// ---------------------------------------------------------------------------

int cmd_hosting(const CommonOpts& opts, const std::string& problem_path,
                const std::string& model, const std::string& params_path, int facets) {
  CaseFile c = load_any_case(opts.case_path);
  if (c.three_phase) {
    std::cerr << "hosting studies run on single-phase cases\n";
    return kExitInput;
  }
  fs::create_directories(opts.out_dir);
  NetworkIndex index(c.network);
  HostingProblem problem = parse_hosting_json(read_file(problem_path), c.base_mva);
  if (facets > 0) problem.polygon_facets = facets;

  LdfParams params = nominal_params(index);
  if (model == "oldf") {
    if (params_path.empty()) {
      std::cerr << "--model oldf requires --params\n";
      return kExitInput;
    }
    params = read_params_json(read_file(params_path), c.network);
    problem.model = VoltageModel::kOldf;
  } else if (model == "ldf") {
    problem.model = VoltageModel::kLdf;
  } else {
    std::cerr << "unknown model '" << model << "'\n";
    return kExitInput;
  }

  HostingSolution sol = solve_hosting(index, c.network.v0, params, c.base, problem);
  ViolationReport rep =
      validate_with_distflow(index, c.network.v0, c.base, problem, sol.pg, sol.qg);
  write_file((fs::path(opts.out_dir) / "hosting_result.json").string(),
             hosting_result_json(problem, sol, rep, c.base_mva) + "\n");
  write_manifest(opts, "hosting", c,
                 json{{"problem", problem_path},
                      {"model", model},
                      {"params", params_path},
                      {"polygon_facets", problem.polygon_facets}});

  std::cout << "status " << sol.status << ", objective " << sol.objective << "\n";
  if (!rep.distflow_converged) {
    std::cout << "validation: nonlinear solve did not converge under the setpoints\n";
    return kExitNumerical;
  }
  std::cout << "validation: worst voltage violation " << rep.worst_voltage_violation
            << " p.u. at bus " << rep.worst_bus << " (" << rep.buses_in_violation
            << " buses outside limits)\n";
  if (opts.strict && rep.worst_voltage_violation > 1e-4) return kExitNumerical;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter-optimized linear power flow workbench for radial feeders"};
  app.require_subcommand(1);

  CommonOpts common;
  auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("case", common.case_path, "feeder case file (.json or .m)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--jobs", common.jobs, "worker threads (0 = hardware)");
    if (with_seed) cmd->add_option("--seed", common.seed, "RNG seed");
    cmd->add_flag("--strict", common.strict, "nonzero exit on invariant failures");
  };

  // pf
  auto* pf = app.add_subcommand("pf", "solve the nonlinear power flow");
  std::string scenario_path;
  add_common(pf);
  pf->add_option("--scenario", scenario_path, "scenario CSV (defaults to the base load)")
      ->check(CLI::ExistingFile);

  // train
  auto* tr = app.add_subcommand("train", "optimize the approximation parameters");
  int scenarios = 20;
  double std_dev = 0.35;
  bool include_highload = false;
  double tol = 1e-6;
  int max_iter = 100;
  add_common(tr);
  tr->add_option("--scenarios", scenarios, "training scenario count");
  tr->add_option("--std", std_dev, "multiplier standard deviation");
  tr->add_flag("--include-highload", include_highload,
               "append the 30-scenario mirrored high-load band");
  tr->add_option("--tol", tol, "gradient tolerance");
  tr->add_option("--max-iter", max_iter, "iteration limit");

  // eval
  auto* ev = app.add_subcommand("eval", "compare models against the nonlinear solution");
  std::string params_path, family = "base";
  int count = 10000;
  double lo = 0.0, hi = 1.5;
  add_common(ev);
  ev->add_option("--params", params_path, "trained parameter file")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--family", family, "base | high | random");
  ev->add_option("--count", count, "random-family scenario count");
  ev->add_option("--lo", lo, "random-family lower multiplier");
  ev->add_option("--hi", hi, "random-family upper multiplier");

  // topo
  auto* tp = app.add_subcommand("topo", "cross-topology training and evaluation");
  std::string switches_path;
  int test_count = 1000;
  std::uint64_t test_seed = 1;
  int train_scenarios = 20;
  std::uint64_t train_seed = 7;
  add_common(tp, false);
  tp->add_option("--switches", switches_path, "explicit config list JSON")
      ->check(CLI::ExistingFile);
  tp->add_option("--test-count", test_count, "test scenarios per topology");
  tp->add_option("--test-seed", test_seed, "test sampling seed");
  tp->add_option("--train-scenarios", train_scenarios, "training scenarios per topology");
  tp->add_option("--train-seed", train_seed, "training sampling seed");

  // hosting
  auto* hc = app.add_subcommand("hosting", "generation utilization study");
  std::string problem_path, model = "ldf", hosting_params_path;
  int facets = 0;
  add_common(hc, false);
  hc->add_option("problem", problem_path, "hosting problem JSON")
      ->required()
      ->check(CLI::ExistingFile);
  hc->add_option("--model", model, "ldf | oldf");
  hc->add_option("--params", hosting_params_path, "trained parameters (for --model oldf)");
  hc->add_option("--polygon-facets", facets, "cone cut count (default from the problem file)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pf->parsed()) return cmd_pf(common, scenario_path);
    if (tr->parsed())
      return cmd_train(common, scenarios, std_dev, include_highload, tol, max_iter);
    if (ev->parsed()) return cmd_eval(common, params_path, family, count, lo, hi);
    if (tp->parsed())
      return cmd_topo(common, switches_path, test_count, test_seed, train_scenarios, train_seed);
    if (hc->parsed()) return cmd_hosting(common, problem_path, model, hosting_params_path, facets);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
