#pragma once

#include <string>
#include <vector>

#include "avsfe/bench.hpp"
#include "avsfe/goal.hpp"

namespace avsfe {

struct AdaptConfig {
  double delta = 0.5;        // Oden-Prudhomme marking tolerance in (0,1)
  int max_steps = 10;        // adaptive (post-warmup) steps
  int max_warmup = 12;       // guard on the uniform warmup phase
  int p_primal = 2;
  int p_dual = 3;
  int delta_p = 0;
  FluxFamily flux = FluxFamily::C0;
  bool classical = false;    // estimator choice; alternative by default

  void validate() const;
};

struct HistoryStep {
  int step = 0;
  bool warmup = false;
  EstimateReport report;
  Mesh mesh;
  std::vector<double> u_vertex;      // primal u at mesh vertices
  std::vector<double> dual_p_vertex; // dual scalar at mesh vertices
};

struct History {
  std::vector<HistoryStep> steps;
  int warmup_steps = 0;
};

// All m with |eps_m| > delta * max|eps_m|; the argmax is always included.
// Degenerate all-zero indicators mark every element.
std::vector<int> mark(const std::vector<double>& indicators, double delta);

// Uniform warmup refinements until |eta| decreases, then mark/bisect cycles.
History adaptive_loop(const Benchmark& bench, const QoIDef& qoi, Mesh mesh,
                      const AdaptConfig& config);

// CSV convergence history plus per-step VTK fields under out_dir.
void history_export(const History& history, const std::string& out_dir,
                    const std::string& stem);

// Vertex samples of the scalar fields, for VTK output.
struct StepFields {
  std::vector<double> u_vertex;
  std::vector<double> dual_p_vertex;
};

// Shared single-step driver: solve the dual, pair it with the primal
// residual, and fill the report row.
EstimateReport estimate_step(const Benchmark& bench, const QoIDef& qoi, const TrialSpace& space,
                             const Eigen::VectorXd& primal_sol, int p_dual, bool classical,
                             int delta_p = 0, StepFields* fields = nullptr);

// Scalar trial field sampled at the mesh vertices.
std::vector<double> vertex_samples(const TrialSpace& space, const Eigen::VectorXd& coeffs);

} // namespace avsfe
