#include "avsfe/adapt.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "avsfe/field.hpp"

namespace avsfe {

void AdaptConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("AdaptConfig: delta must lie in (0,1)");
  if (max_steps < 0) throw std::invalid_argument("AdaptConfig: max_steps must be >= 0");
  if (p_dual <= p_primal)
    throw std::invalid_argument("AdaptConfig: p_dual must exceed p_primal");
}

std::vector<int> mark(const std::vector<double>& indicators, double delta) {
  if (indicators.empty()) throw std::invalid_argument("mark: empty indicator set");
  double max_abs = 0.0;
  for (double e : indicators) max_abs = std::max(max_abs, std::abs(e));
  std::vector<int> marked;
  if (max_abs == 0.0) {
    // Degenerate: nothing distinguishes the elements.
    marked.resize(indicators.size());
    for (size_t i = 0; i < indicators.size(); ++i) marked[i] = static_cast<int>(i);
    return marked;
  }
  for (size_t i = 0; i < indicators.size(); ++i)
    if (std::abs(indicators[i]) > delta * max_abs) marked.push_back(static_cast<int>(i));
  if (marked.empty()) {
    for (size_t i = 0; i < indicators.size(); ++i)
      if (std::abs(indicators[i]) == max_abs) {
        marked.push_back(static_cast<int>(i));
        break;
      }
  }
  return marked;
}

std::vector<double> vertex_samples(const TrialSpace& space, const Eigen::VectorXd& coeffs) {
  const Mesh& mesh = *space.mesh;
  std::vector<double> out(mesh.num_vertices(), 0.0);
  std::vector<Eigen::Vector2d> corners;
  if (mesh.cell_type == CellType::Quad)
    corners = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  else
    corners = {{0, 0}, {1, 0}, {0, 1}};
  for (int m = 0; m < mesh.num_elems(); ++m) {
    const FieldValues fv = eval_field(space, coeffs, m, corners);
    for (int k = 0; k < mesh.verts_per_elem(); ++k) out[mesh.elems[m][k]] = fv.u[k];
  }
  return out;
}

EstimateReport estimate_step(const Benchmark& bench, const QoIDef& qoi, const TrialSpace& space,
                             const Eigen::VectorXd& primal_sol, int p_dual, bool classical,
                             int delta_p, StepFields* fields) {
  EstimateReport rep;
  rep.primal_dofs = space.total_dofs();
  rep.elements = space.mesh->num_elems();

  const DualField dual =
      classical ? classical_dual_solve(bench.problem, qoi, space, p_dual, delta_p)
                : alternative_dual_solve(bench.problem, qoi, space, p_dual, delta_p);
  rep.dual_dofs = dual.reported_dofs();
  rep.indicators = element_indicators(bench.problem, space, primal_sol, dual);
  if (fields) {
    fields->u_vertex = vertex_samples(space, primal_sol);
    if (dual.repr == DualField::Repr::Conforming)
      fields->dual_p_vertex = vertex_samples(*dual.space, dual.coeffs);
  }
  rep.eta = 0.0;
  for (double e : rep.indicators) rep.eta += e;

  if (bench.problem.has_exact()) {
    const double qh = qoi_apply(qoi, space, primal_sol);
    const double qex = bench.exact_qoi(qoi);
    rep.qoi_error = qex - qh;
    rep.eff = effectivity(rep.eta, rep.qoi_error);
    rep.l2_error = l2_error_u(space, primal_sol,
                              [&](const Eigen::Vector2d& x) { return bench.exact_u(x); });
  } else {
    rep.qoi_error = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

History adaptive_loop(const Benchmark& bench, const QoIDef& qoi, Mesh mesh,
                      const AdaptConfig& config) {
  config.validate();
  if (mesh.cell_type != CellType::Tri)
    throw std::invalid_argument("adaptive_loop: local refinement requires triangles");

  History hist;
  auto run_step = [&](const Mesh& m, bool warmup, int step) {
    const TrialSpace space = make_trial_space(m, config.flux, config.p_primal);
    const SparseSystem sys = assemble(bench.problem, space, config.p_primal + config.delta_p);
    const Eigen::VectorXd sol = solve_spd(sys);
    StepFields fields;
    EstimateReport rep = estimate_step(bench, qoi, space, sol, config.p_dual, config.classical,
                                       config.delta_p, &fields);
    HistoryStep hs{step, warmup, std::move(rep), m, std::move(fields.u_vertex),
                   std::move(fields.dual_p_vertex)};
    hist.steps.push_back(std::move(hs));
  };

  // Warmup: uniform refinements until |eta| decreases, signaling that the
  // indicators have become reliable.
  int step = 0;
  run_step(mesh, true, step++);
  double prev_eta = std::abs(hist.steps.back().report.eta);
  for (int w = 0; w < config.max_warmup; ++w) {
    mesh = uniform_refine(mesh);
    run_step(mesh, true, step++);
    const double cur = std::abs(hist.steps.back().report.eta);
    const bool decreased = cur < prev_eta;
    prev_eta = cur;
    if (decreased) break;
  }
  hist.warmup_steps = step;

  for (int k = 0; k < config.max_steps; ++k) {
    const std::vector<int> marked = mark(hist.steps.back().report.indicators, config.delta);
    mesh = bisect_marked(mesh, marked);
    run_step(mesh, false, step++);
  }
  return hist;
}

void history_export(const History& history, const std::string& out_dir, const std::string& stem) {
  if (history.steps.empty()) throw std::invalid_argument("history_export: empty history");
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/" + stem + "_history.csv";
  std::ofstream os(csv_path);
  if (!os) throw std::runtime_error("history_export: cannot open " + csv_path);
  os << "step,elements,primal_dofs,dual_dofs,qoi_error,eta_est,eff,l2_error\n";
  char buf[256];
  for (const auto& s : history.steps) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.4e,%.4e,%.4e,%.4e\n", s.step,
                  s.report.elements, s.report.primal_dofs, s.report.dual_dofs, s.report.qoi_error,
                  s.report.eta, s.report.eff ? *s.report.eff : std::nan(""), s.report.l2_error);
    os << buf;
  }
  for (const auto& s : history.steps) {
    std::vector<std::pair<std::string, std::vector<double>>> point_data;
    if (!s.u_vertex.empty()) point_data.push_back({"u", s.u_vertex});
    if (!s.dual_p_vertex.empty()) point_data.push_back({"dual_p", s.dual_p_vertex});
    write_vtk(out_dir + "/" + stem + "_step" + std::to_string(s.step) + ".vtk", s.mesh,
              point_data, {{"indicator", s.report.indicators}});
  }
}

} // namespace avsfe
