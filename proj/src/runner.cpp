#include "avsfe/runner.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "avsfe/field.hpp"

namespace avsfe {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

QoIDef qoi_by_name(const std::string& name) {
  if (name == "avg-u") return qoi_avg_u_quadrant();
  if (name == "avg-dudx") return qoi_avg_dudx_quadrant();
  if (name == "avg-qx") return qoi_avg_qx_quadrant();
  if (name == "line-qx") return qoi_line_avg_qx_left();
  throw std::invalid_argument("unknown qoi '" + name + "' (avg-u, avg-dudx, avg-qx, line-qx)");
}

// Per-benchmark run defaults matching the verification setups.
void apply_benchmark_defaults(RunConfig& c) {
  if (c.benchmark == "laplace-bump") {
    c.n0 = 1;
    c.levels = 5;
  } else if (c.benchmark == "convdiff-pe100") {
    c.n0 = 4;
    c.levels = 6;
  } else if (c.benchmark == "convdiff-pe200-skew") {
    c.n0 = 8;
    c.levels = 4;
    c.skewed = true;
  } else if (c.benchmark == "convdiff-pe10-lineflux") {
    c.n0 = 8;
    c.levels = 4;
    c.qoi_name = "line-qx";
  } else if (c.benchmark == "convdiff-pe100-rt") {
    c.n0 = 4;
    c.levels = 5;
    c.element_type = CellType::Tri;
    c.flux = FluxFamily::RT;
    c.report_flux_error = true;
  }
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace

std::vector<std::string> benchmark_names() {
  return {"laplace-bump", "convdiff-pe100", "convdiff-pe200-skew", "convdiff-pe10-lineflux",
          "convdiff-pe100-rt"};
}

Benchmark benchmark_by_name(const std::string& name) {
  if (name == "laplace-bump") return laplace_bump();
  if (name == "convdiff-pe100" || name == "convdiff-pe100-rt")
    return convdiff_layers(100.0, {1.0, 1.0});
  if (name == "convdiff-pe200-skew") return convdiff_layers(200.0, {1.0, 1.0});
  if (name == "convdiff-pe10-lineflux") return convdiff_layers(10.0, {1.0, 1.0});
  std::string names;
  for (const auto& n : benchmark_names()) names += " " + n;
  throw std::invalid_argument("unknown benchmark '" + name + "'; valid names:" + names);
}

void RunConfig::validate() const {
  benchmark_by_name(benchmark);
  if (p_primal < 1 || p_primal > 3)
    throw std::invalid_argument("p_primal must be in [1,3]");
  if (p_dual <= p_primal)
    throw std::invalid_argument(
        "p_dual must exceed p_primal: at equal degree Galerkin orthogonality "
        "annihilates the estimate");
  if (p_dual > 4) throw std::invalid_argument("p_dual must be at most 4");
  if (delta_p < 0 || delta_p > 2) throw std::invalid_argument("delta_p must be in [0,2]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  if (flux == FluxFamily::RT && element_type != CellType::Tri)
    throw std::invalid_argument("RT flux requires element_type = tri");
  if (mode == RunMode::Adaptive && element_type != CellType::Tri)
    throw std::invalid_argument("adaptive mode requires element_type = tri");
  if (skewed && element_type != CellType::Quad)
    throw std::invalid_argument("the skewed mesh is quadrilateral");
}

std::string RunConfig::canonical_text() const {
  std::ostringstream os;
  os << "benchmark = " << benchmark << "\n";
  os << "mode = " << (mode == RunMode::UniformStudy ? "uniform" : "adaptive") << "\n";
  os << "element_type = " << (element_type == CellType::Quad ? "quad" : "tri") << "\n";
  os << "flux = " << (flux == FluxFamily::C0 ? "c0" : "rt") << "\n";
  os << "p_primal = " << p_primal << "\n";
  os << "p_dual = " << p_dual << "\n";
  os << "delta_p = " << delta_p << "\n";
  os << "n0 = " << n0 << "\n";
  os << "levels = " << levels << "\n";
  os << "qoi = " << qoi_name << "\n";
  os << "estimator = "
     << (estimator == EstimatorChoice::Classical
             ? "classical"
             : estimator == EstimatorChoice::Alternative ? "alternative" : "both")
     << "\n";
  os << "delta = " << delta << "\n";
  os << "max_steps = " << max_steps << "\n";
  os << "skew_amplitude = " << skew_amplitude << "\n";
  os << "report_flux_error = " << (report_flux_error ? "on" : "off") << "\n";
  return os.str();
}

RunConfig validate_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::pair<std::string, int>> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) config_error(lineno, "expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));
    if (key.empty() || val.empty()) config_error(lineno, "expected key = value");
    if (kv.count(key)) config_error(lineno, "duplicate key '" + key + "'");
    kv[key] = {val, lineno};
  }

  auto take = [&](const std::string& key) -> std::pair<std::string, int> {
    auto it = kv.find(key);
    if (it == kv.end()) return {"", 0};
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  auto to_int = [&](const std::pair<std::string, int>& v) {
    try {
      size_t pos = 0;
      const int n = std::stoi(v.first, &pos);
      if (pos != v.first.size()) throw std::invalid_argument("");
      return n;
    } catch (...) {
      config_error(v.second, "expected an integer, got '" + v.first + "'");
    }
  };
  auto to_double = [&](const std::pair<std::string, int>& v) {
    try {
      size_t pos = 0;
      const double x = std::stod(v.first, &pos);
      if (pos != v.first.size()) throw std::invalid_argument("");
      return x;
    } catch (...) {
      config_error(v.second, "expected a number, got '" + v.first + "'");
    }
  };
  auto to_bool = [&](const std::pair<std::string, int>& v) {
    if (v.first == "on" || v.first == "true") return true;
    if (v.first == "off" || v.first == "false") return false;
    config_error(v.second, "expected on/off, got '" + v.first + "'");
  };

  const auto bench = take("benchmark");
  if (bench.second == 0) throw std::invalid_argument("config: missing required key 'benchmark'");
  c.benchmark = bench.first;
  try {
    benchmark_by_name(c.benchmark);
  } catch (const std::exception& e) {
    config_error(bench.second, e.what());
  }
  apply_benchmark_defaults(c);

  const auto mode = take("mode");
  if (mode.second == 0) throw std::invalid_argument("config: missing required key 'mode'");
  if (mode.first == "uniform") {
    c.mode = RunMode::UniformStudy;
  } else if (mode.first == "adaptive") {
    c.mode = RunMode::Adaptive;
    c.element_type = CellType::Tri;
  } else {
    config_error(mode.second, "mode must be 'uniform' or 'adaptive'");
  }

  if (auto v = take("element_type"); v.second) {
    if (v.first == "quad") c.element_type = CellType::Quad;
    else if (v.first == "tri") c.element_type = CellType::Tri;
    else config_error(v.second, "element_type must be 'quad' or 'tri'");
  }
  if (auto v = take("flux"); v.second) {
    if (v.first == "c0") c.flux = FluxFamily::C0;
    else if (v.first == "rt") c.flux = FluxFamily::RT;
    else config_error(v.second, "flux must be 'c0' or 'rt'");
  }
  if (auto v = take("p_primal"); v.second) c.p_primal = to_int(v);
  c.p_dual = c.p_primal + 1;
  if (auto v = take("p_dual"); v.second) c.p_dual = to_int(v);
  if (auto v = take("delta_p"); v.second) c.delta_p = to_int(v);
  if (auto v = take("n0"); v.second) c.n0 = to_int(v);
  if (auto v = take("levels"); v.second) c.levels = to_int(v);
  if (auto v = take("qoi"); v.second) c.qoi_name = v.first;
  if (auto v = take("estimator"); v.second) {
    if (v.first == "classical") c.estimator = EstimatorChoice::Classical;
    else if (v.first == "alternative") c.estimator = EstimatorChoice::Alternative;
    else if (v.first == "both") c.estimator = EstimatorChoice::Both;
    else config_error(v.second, "estimator must be classical, alternative, or both");
  }
  if (auto v = take("delta"); v.second) {
    c.delta = to_double(v);
    if (!(c.delta > 0.0 && c.delta < 1.0))
      config_error(v.second, "delta must lie in the open interval (0,1)");
  }
  if (auto v = take("max_steps"); v.second) c.max_steps = to_int(v);
  if (auto v = take("skew_amplitude"); v.second) c.skew_amplitude = to_double(v);
  if (auto v = take("report_flux_error"); v.second) c.report_flux_error = to_bool(v);
  if (auto v = take("out"); v.second) c.out_dir = v.first;

  if (!kv.empty()) {
    const auto& [key, val] = *kv.begin();
    config_error(val.second, "unknown key '" + key + "'");
  }

  try {
    c.qoi = qoi_by_name(c.qoi_name);
    c.validate();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return validate_config(ss.str());
}

namespace {

Mesh initial_mesh(const RunConfig& c) {
  if (c.skewed) return build_skewed(c.n0, SkewParams{c.skew_amplitude});
  return build_structured(c.element_type, c.n0);
}

void write_manifest(const RunConfig& c, const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  std::istringstream is(c.canonical_text());
  std::string line;
  while (std::getline(is, line)) {
    const size_t eq = line.find('=');
    j["config"][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  char id[32];
  std::snprintf(id, sizeof(id), "%016llx",
                static_cast<unsigned long long>(fnv1a(c.canonical_text())));
  j["run_id"] = id;
  j["artifacts"] = artifacts;
  std::ofstream os(c.out_dir + "/manifest.json");
  os << j.dump(2) << "\n";
}

std::string estimator_name(bool classical) { return classical ? "classical" : "alternative"; }

} // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  const Benchmark bench = benchmark_by_name(config.benchmark);
  std::filesystem::create_directories(config.out_dir);

  RunResult result;

  if (config.mode == RunMode::Adaptive) {
    AdaptConfig ac;
    ac.delta = config.delta;
    ac.max_steps = config.max_steps;
    ac.p_primal = config.p_primal;
    ac.p_dual = config.p_dual;
    ac.delta_p = config.delta_p;
    ac.flux = config.flux;
    ac.classical = config.estimator == EstimatorChoice::Classical;
    result.history = adaptive_loop(bench, config.qoi, initial_mesh(config), ac);
    history_export(result.history, config.out_dir, config.benchmark);
    result.artifacts.push_back(config.out_dir + "/" + config.benchmark + "_history.csv");
    write_manifest(config, result.artifacts);
    return result;
  }

  std::vector<bool> classical_runs;
  if (config.estimator == EstimatorChoice::Classical) classical_runs = {true};
  else if (config.estimator == EstimatorChoice::Alternative) classical_runs = {false};
  else classical_runs = {true, false};

  // Solve each level once; pair with every requested estimator.
  Mesh mesh = initial_mesh(config);
  std::map<std::string, std::vector<EstimateReport>> tables;
  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) mesh = uniform_refine(mesh);
    const TrialSpace space = make_trial_space(mesh, config.flux, config.p_primal);
    const SparseSystem sys = assemble(bench.problem, space, config.p_primal + config.delta_p);
    const Eigen::VectorXd sol = solve_spd(sys);
    for (bool classical : classical_runs) {
      EstimateReport rep = estimate_step(bench, config.qoi, space, sol, config.p_dual,
                                         classical, config.delta_p);
      if (config.report_flux_error && bench.problem.has_exact())
        rep.flux_l2_error = l2_error_flux(
            space, sol, [&](const Eigen::Vector2d& x) { return bench.exact_q(x); });
      tables[estimator_name(classical)].push_back(std::move(rep));
    }
  }

  for (const auto& [est, rows] : tables) {
    const std::string path = config.out_dir + "/" + config.benchmark + "_" + est + ".csv";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("run: cannot open " + path);
    os << (config.report_flux_error
               ? "primal_dofs,qoi_error,flux_l2_error,dual_dofs,eta_est,eff\n"
               : "primal_dofs,qoi_error,dual_dofs,eta_est,eff\n");
    for (const auto& rep : rows) os << rep.csv_row(config.report_flux_error) << "\n";
    result.artifacts.push_back(path);
  }
  result.tables = std::move(tables);
  write_manifest(config, result.artifacts);
  return result;
}

} // namespace avsfe
