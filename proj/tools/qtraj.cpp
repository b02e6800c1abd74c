// Benchmark harness: reproduces the five measurement examples, the map
// identity checks, and the dt sweeps, emitting CSV/JSON plot data.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtraj/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qtraj;

namespace {

constexpr const char* kVersion = "qtraj 1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Flat key=value config; '#' and ';' start comments. Matrix values are JSON
// arrays of [re, im] pairs.
std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) throw ConfigError(what + ": ragged matrix");
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (!e.is_array() || e.size() != 2) throw ConfigError(what + ": entries must be [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

StateVector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a vector");
  StateVector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2) throw ConfigError(what + ": entries must be [re, im]");
    v[i] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

struct Experiment {
  std::string example = "qubit-z";
  MeasurementSetup setup;
  ProtocolConfig proto;
  std::vector<double> dt_grid = {4e-3, 1e-2, 2.5e-2, 6.3e-2};  // gamma*dt
  int sweep_records = 1000;
  std::map<std::string, std::string> raw;  // snapshot for the manifest
};

Experiment load_experiment(const std::string& config_path) {
  Experiment ex;
  ex.proto.realizations = 500;  // desk scale by default; --full restores 5000
  auto kv = parse_kv_file(config_path);
  ex.raw = kv;

  double gamma = 1.0;
  if (kv.count("gamma")) gamma = std::stod(kv["gamma"]);
  if (gamma <= 0.0) throw ConfigError("gamma must be positive");

  if (kv.count("example")) ex.example = kv["example"];
  if (ex.example == "custom") {
    if (!kv.count("c") || !kv.count("initial_state"))
      throw ConfigError("custom setup requires 'c' and 'initial_state'");
    ex.setup.c = matrix_from_json(json::parse(kv["c"]), "c");
    ex.setup.dim = static_cast<int>(ex.setup.c.rows());
    ex.setup.H = kv.count("H") ? matrix_from_json(json::parse(kv["H"]), "H")
                               : ComplexMatrix::Zero(ex.setup.dim, ex.setup.dim);
    ex.setup.initial_state =
        normalized_state(vector_from_json(json::parse(kv["initial_state"]), "initial_state"));
    if (kv.count("eta")) ex.setup.eta = std::stod(kv["eta"]);
    ex.setup.gamma = gamma;
  } else {
    const auto id = parse_example_id(ex.example);
    if (!id) throw ConfigError("unknown example: " + ex.example);
    ex.setup = example_setup(*id, gamma);
  }

  if (kv.count("gamma_dt_bin")) ex.proto.gamma_dt_bin = std::stod(kv["gamma_dt_bin"]);
  if (kv.count("gamma_dt_fine")) ex.proto.gamma_dt_fine = std::stod(kv["gamma_dt_fine"]);
  if (kv.count("total_time")) ex.proto.total_time_in_gamma = std::stod(kv["total_time"]);
  if (kv.count("realizations")) ex.proto.realizations = std::stoi(kv["realizations"]);
  if (kv.count("seed")) ex.proto.seed = std::stoull(kv["seed"]);
  if (kv.count("maps") && kv["maps"] != "all") {
    ex.proto.map_kinds.clear();
    std::stringstream ss(kv["maps"]);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto kind = parse_map_kind(tok);
      if (!kind) throw ConfigError("unknown map kind: " + tok);
      ex.proto.map_kinds.push_back(*kind);
    }
  }
  if (kv.count("dt_grid")) {
    ex.dt_grid.clear();
    std::stringstream ss(kv["dt_grid"]);
    std::string tok;
    while (std::getline(ss, tok, ',')) ex.dt_grid.push_back(std::stod(tok));
  }
  if (kv.count("sweep_records")) ex.sweep_records = std::stoi(kv["sweep_records"]);

  try {
    ex.setup.validate();
    ex.proto.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (ex.sweep_records < 1) throw ConfigError("sweep_records must be >= 1");
  return ex;
}

void write_manifest(const fs::path& dir, const Experiment& ex, const std::string& command,
                    double seconds, int aborted, const std::vector<std::string>& outputs) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = ex.proto.seed;
  m["example"] = ex.example;
  m["config"] = ex.raw;
  m["elapsed_seconds"] = seconds;
  m["aborted_trajectories"] = aborted;
  m["outputs"] = outputs;
  std::ofstream os(dir / "manifest.json");
  os << m.dump(2) << "\n";
}

int cmd_run(const Experiment& ex, const fs::path& out_dir, int jobs) {
  const auto t_start = std::chrono::steady_clock::now();
  const int R = ex.proto.realizations;
  const auto& kinds = ex.proto.map_kinds;

  if (!step_size_ok(ex.setup, ex.proto.gamma_dt_bin / ex.setup.gamma))
    std::cerr << "warning: dt_bin * |c|^2 is not small; coarse maps may be unreliable\n";

  std::map<MapKind, std::vector<double>> sigma, dmean;
  for (MapKind k : kinds) {
    sigma[k].assign(R, 0.0);
    dmean[k].assign(R, 0.0);
  }
  std::vector<char> ok(R, 0);
  TrajectoryRun sample_run;

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= R) return;
      TrajectoryRun run = run_trajectory(ex.setup, ex.proto, idx);
      if (run.aborted) continue;
      ok[idx] = 1;
      for (MapKind k : kinds) {
        sigma[k][idx] = std::sqrt(time_avg_trse(run, k));
        dmean[k][idx] = mean_trae(run, k);
      }
      if (idx == 0) sample_run = std::move(run);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int aborted = 0;
  for (int i = 0; i < R; ++i)
    if (!ok[i]) ++aborted;
  if (aborted > R / 100) {
    std::cerr << "error: " << aborted << " of " << R << " trajectories aborted\n";
    return 3;
  }

  fs::create_directories(out_dir);
  std::vector<std::string> outputs;

  json summary;
  summary["manifest"] = "manifest.json";
  summary["realizations"] = R;
  summary["aborted"] = aborted;
  for (MapKind k : kinds) {
    std::vector<double> sig, dm;
    for (int i = 0; i < R; ++i)
      if (ok[i]) {
        sig.push_back(sigma[k][i]);
        dm.push_back(dmean[k][i]);
      }
    const ErrorSummary es = ensemble_reduce(sig, dm, aborted);
    const std::string name = map_name(k);
    summary["maps"][name]["mtrse"] = es.mtrse;
    summary["maps"][name]["mtrae"] = es.mtrae;

    std::ofstream hs(out_dir / ("hist_" + name + ".csv"));
    hs << "# manifest: manifest.json\nbin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < es.hist_counts.size(); ++b)
      hs << fmt(es.hist_edges[b]) << "," << fmt(es.hist_edges[b + 1]) << "," << es.hist_counts[b]
         << "\n";
    outputs.push_back("hist_" + name + ".csv");
  }
  {
    std::ofstream os(out_dir / "summary.json");
    os << summary.dump(2) << "\n";
    outputs.push_back("summary.json");
  }

  if (!sample_run.records.empty()) {
    const ComplexMatrix obs = 0.5 * (ex.setup.c + ex.setup.c.adjoint());
    auto expect = [&](const StateVector& psi) {
      return (psi.adjoint() * obs * psi)(0, 0).real();
    };
    std::ofstream ts(out_dir / "trajectory_sample.csv");
    ts << "# manifest: manifest.json\nt,y_or_I,z_true";
    for (MapKind k : kinds) ts << ",z_" << map_name(k) << ",D_" << map_name(k);
    ts << "\n";
    for (std::size_t j = 1; j <= sample_run.records.size(); ++j) {
      const auto& rec = sample_run.records[j - 1];
      ts << fmt(rec.t + rec.dt_bin) << "," << fmt(rec.I) << ","
         << fmt(expect(sample_run.true_states[j]));
      for (MapKind k : kinds) {
        const auto& st = sample_run.coarse_states.at(k)[j];
        ts << "," << fmt(expect(st)) << "," << fmt(trae_pure(sample_run.true_states[j], st));
      }
      ts << "\n";
    }
    outputs.push_back("trajectory_sample.csv");
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  write_manifest(out_dir, ex, "run", secs, aborted, outputs);
  std::cout << "run complete: " << (R - aborted) << "/" << R << " trajectories, outputs in "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_sweep(const Experiment& ex, const fs::path& out_dir, int jobs) {
  (void)jobs;  // per-dt work is already short; kept serial for determinism
  const auto t_start = std::chrono::steady_clock::now();
  if (ex.dt_grid.size() < 3) {
    std::cerr << "error: dt_grid needs at least 3 points\n";
    return 2;
  }
  std::vector<double> grid = ex.dt_grid;
  std::sort(grid.begin(), grid.end());
  const double gdt_max = grid.back();
  const auto& kinds = ex.proto.map_kinds;

  std::map<MapKind, std::vector<std::pair<double, double>>> points;
  for (double gdt : grid) {
    // Refine the fine step quadratically with dt so the oracle's own error
    // stays below the smallest map error being measured.
    double gdt_fine = 1.6e-4 * (gdt / gdt_max) * (gdt / gdt_max);
    const int n = std::max(1, static_cast<int>(std::llround(gdt / gdt_fine)));
    gdt_fine = gdt / n;
    const auto med = single_bin_trae_median(ex.setup, kinds, gdt / ex.setup.gamma,
                                            gdt_fine / ex.setup.gamma, ex.sweep_records,
                                            ex.proto.seed);
    for (const auto& [k, v] : med) points[k].push_back({gdt, v});
  }

  fs::create_directories(out_dir);
  std::ofstream ps(out_dir / "sweep_points.csv");
  ps << "# manifest: manifest.json\nmap,gamma_dt,median_trae\n";
  std::ofstream ss(out_dir / "scaling.csv");
  ss << "# manifest: manifest.json\nmap,slope,intercept,r2\n";
  for (MapKind k : kinds) {
    for (const auto& [gdt, v] : points[k])
      ps << map_name(k) << "," << fmt(gdt) << "," << fmt(v) << "\n";
    const ScalingFit f = fit_scaling(points[k]);
    ss << map_name(k) << "," << fmt(f.slope) << "," << fmt(f.intercept) << "," << fmt(f.r_squared)
       << "\n";
    std::cout << map_name(k) << ": slope " << fmt(f.slope) << " (r2 " << fmt(f.r_squared)
              << ")\n";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  write_manifest(out_dir, ex, "sweep", secs, 0, {"sweep_points.csv", "scaling.csv"});
  return 0;
}

int cmd_check(const Experiment& ex) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << name << ": " << (ok ? "PASS" : "FAIL") << " (" << detail << ")\n";
    all_ok = all_ok && ok;
  };

  // Term-ledger reconstruction across all presets.
  {
    double worst = 0.0;
    RngStream rng(ex.proto.seed, 1);
    for (const auto id : all_examples()) {
      const MeasurementSetup s = example_setup(id);
      MeasurementSetup s0 = s;
      s0.H = ComplexMatrix::Zero(s.dim, s.dim);
      for (int trial = 0; trial < 20; ++trial) {
        BinnedRecord rec{rng.normal(), 0.0, 0.0, 1e-2 * (1.0 + trial)};
        for (MapKind k : all_map_kinds()) {
          BinnedRecord rk = rec;
          if (k == MapKind::Phi) rk.phi = rng.normal();
          ComplexMatrix sum = table1_term(TermCell::AllMaps, 0.0, rk, s0) +
                              table1_term(TermCell::AllMaps, 0.5, rk, s0) +
                              table1_term(TermCell::AllMaps, 1.0, rk, s0);
          if (k != MapKind::Ito) sum += table1_term(TermCell::RouchonAndUp, 1.0, rk, s0);
          if (k == MapKind::Wonglakhon || k == MapKind::RobinetTruncated || k == MapKind::Phi)
            sum += table1_term(TermCell::WonglakhonAndUp, 1.5, rk, s0) +
                   table1_term(TermCell::WonglakhonAndUp, 2.0, rk, s0);
          if (k == MapKind::RobinetTruncated || k == MapKind::Phi)
            sum += table1_term(TermCell::RobinetAndPhi, 1.5, rk, s0);
          if (k == MapKind::RobinetTruncated)
            sum += table1_term(TermCell::RobinetOnly, 2.0, rk, s0);
          if (k == MapKind::Phi) sum += table1_term(TermCell::PhiOnly, 1.5, rk, s0);
          worst = std::max(worst, (build_map(k, s0, rk) - sum).cwiseAbs().maxCoeff());
        }
      }
    }
    report("term ledger reconstruction", worst <= 1e-14, "max diff " + fmt(worst));
  }

  // c^2 = 0: the Ito and Rouchon-Ralph maps coincide, as do W and robinet.
  {
    const MeasurementSetup s = example_setup(ExampleId::QubitFluorescence);
    RngStream rng(ex.proto.seed, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      BinnedRecord rec{rng.normal(), 0.0, 0.0, 1e-2};
      worst = std::max(worst, (build_map(MapKind::Ito, s, rec) -
                               build_map(MapKind::RouchonRalph, s, rec))
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst, (build_map(MapKind::Wonglakhon, s, rec) -
                               build_map(MapKind::RobinetTruncated, s, rec))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    report("nilpotent-coupling map identities", worst <= 1e-15, "max entry diff " + fmt(worst));
  }

  // Normal coupling: the Phi map does not depend on phi.
  {
    double worst = 0.0;
    for (const auto id : {ExampleId::QubitZ, ExampleId::Spin1Z}) {
      const MeasurementSetup s = example_setup(id);
      BinnedRecord a{0.7, 0.0, 0.0, 1e-2};
      BinnedRecord b{0.7, 2.3, 0.0, 1e-2};
      worst = std::max(worst,
                       (build_map(MapKind::Phi, s, a) - build_map(MapKind::Phi, s, b))
                           .cwiseAbs()
                           .maxCoeff());
    }
    report("phi-independence for normal coupling", worst == 0.0, "max entry diff " + fmt(worst));
  }

  // Completeness residual slopes on the decaying-qubit setup.
  {
    const MeasurementSetup s = example_setup(ExampleId::QubitFluorescence);
    std::vector<std::pair<double, double>> ito, phi;
    for (double gdt : {1e-3, 1e-2, 1e-1}) {
      ito.push_back({gdt, completeness_residual(MapKind::Ito, s, gdt)});
      phi.push_back({gdt, completeness_residual(MapKind::Phi, s, gdt)});
    }
    const double s_ito = fit_scaling(ito).slope;
    const double s_phi = fit_scaling(phi).slope;
    report("completeness slope (ito)", std::abs(s_ito - 2.0) <= 0.1, "slope " + fmt(s_ito));
    report("completeness slope (phi)", s_phi > 2.2, "slope " + fmt(s_phi));
  }

  // Record-averaged Phi channel reproduces the deterministic evolution
  // through second order.
  {
    const MeasurementSetup s = example_setup(ExampleId::QubitFluorescence);
    std::vector<std::pair<double, double>> pts;
    for (double gdt : {1e-3, 1e-2, 1e-1}) pts.push_back({gdt, lindblad_residual(s, gdt)});
    const double slope = fit_scaling(pts).slope;
    report("deterministic-evolution residual slope", slope > 2.0, "slope " + fmt(slope));
  }

  // Purity deficit of the phi-averaged state grows as dt^3.
  {
    const MeasurementSetup s = example_setup(ExampleId::QubitFluorescence);
    std::vector<std::pair<double, double>> pts;
    for (double gdt : {4e-3, 1e-2, 2.5e-2}) pts.push_back({gdt, purity_deficit_phi(s, gdt, 0.0)});
    const double slope = fit_scaling(pts).slope;
    report("purity deficit slope", std::abs(slope - 3.0) <= 0.15, "slope " + fmt(slope));
  }

  return all_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-step quantum trajectory benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  bool full = false;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { has_seed = true; });
    sub->add_flag("--full", full, "paper-scale ensemble (R = 5000)");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--out", out_dir, "output directory");
  };
  add_common(app.add_subcommand("run", "ensemble protocol, histograms and summaries"));
  add_common(app.add_subcommand("sweep", "single-bin error scaling over a dt grid"));
  add_common(app.add_subcommand("check", "map invariant suite"));

  CLI11_PARSE(app, argc, argv);

  try {
    Experiment ex = load_experiment(config_path);
    if (has_seed) ex.proto.seed = seed_override;
    if (full) ex.proto.realizations = 5000;
    if (jobs < 1) jobs = 1;

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "run") return cmd_run(ex, out_dir, jobs);
    if (sub == "sweep") return cmd_sweep(ex, out_dir, jobs);
    return cmd_check(ex);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
