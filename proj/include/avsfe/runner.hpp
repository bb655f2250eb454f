#pragma once

#include <map>
#include <string>
#include <vector>

#include "avsfe/adapt.hpp"

namespace avsfe {

enum class RunMode { UniformStudy, Adaptive };
enum class EstimatorChoice { Classical, Alternative, Both };

// One batch run: a named benchmark, discretization choices, and either a
// uniform refinement study or an adaptive loop.
struct RunConfig {
  std::string benchmark;
  RunMode mode = RunMode::UniformStudy;
  CellType element_type = CellType::Quad;
  FluxFamily flux = FluxFamily::C0;
  int p_primal = 2;
  int p_dual = 3;
  int delta_p = 0; // test-space enrichment above the trial degree
  int n0 = 4;      // initial structured mesh subdivisions
  int levels = 5;  // uniform-study mesh levels
  QoIDef qoi;
  std::string qoi_name = "avg-u";
  EstimatorChoice estimator = EstimatorChoice::Alternative;
  double delta = 0.5;
  int max_steps = 10;
  double skew_amplitude = 0.05;
  bool skewed = false;
  bool report_flux_error = false;
  std::string out_dir = "out";

  void validate() const;
  std::string canonical_text() const; // manifest echo, key-sorted
};

// Parses the flat key = value format; diagnostics carry line numbers.
RunConfig validate_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

std::vector<std::string> benchmark_names();
Benchmark benchmark_by_name(const std::string& name);

struct RunResult {
  // Estimator name -> table rows (uniform studies).
  std::map<std::string, std::vector<EstimateReport>> tables;
  History history; // adaptive runs
  std::vector<std::string> artifacts;
};

RunResult run(const RunConfig& config);

} // namespace avsfe
