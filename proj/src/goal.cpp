#include "avsfe/goal.hpp"

#include <cmath>
#include <cstdio>

#include "avsfe/parallel.hpp"

namespace avsfe {

DualField classical_dual_solve(const ProblemDef& problem, const QoIDef& qoi,
                               const TrialSpace& primal_space, int p_dual, int delta_p) {
  const Mesh& mesh = *primal_space.mesh;
  DualField dual;
  dual.repr = DualField::Repr::Broken;
  dual.p_dual = p_dual;
  dual.p_test = p_dual + delta_p;
  dual.space = std::make_shared<TrialSpace>(make_trial_space(mesh, primal_space.flux, p_dual));

  // Transpose of the degree-p_dual normal-equation system (K is symmetric)
  // with the QoI evaluated on the trial basis as right-hand side.
  SparseSystem sys = assemble(problem, *dual.space, dual.p_test, LoadSpec::none());
  Eigen::VectorXd rhs = qoi_trial_vector(qoi, *dual.space);
  for (int i = 0; i < sys.dim(); ++i)
    if (sys.constrained[i]) rhs[i] = 0.0;
  sys.F = rhs;
  dual.coeffs = solve_spd(sys);
  return dual;
}

DualField alternative_dual_solve(const ProblemDef& problem, const QoIDef& qoi,
                                 const TrialSpace& primal_space, int p_dual, int delta_p) {
  const Mesh& mesh = *primal_space.mesh;
  DualField dual;
  dual.repr = DualField::Repr::Conforming;
  dual.p_dual = p_dual;
  dual.p_test = p_dual; // nodal interpolation at the dual degree is exact
  dual.space = std::make_shared<TrialSpace>(make_trial_space(mesh, primal_space.flux, p_dual));

  const ProblemDef dp = problem.dual();
  SparseSystem sys = assemble(dp, *dual.space, p_dual + delta_p, LoadSpec::qoi_load(qoi));
  dual.coeffs = solve_spd(sys);
  return dual;
}

namespace {

// Enriched-basis coefficients of the dual pair restricted to element m, in
// the test layout used for the primal residual.
Eigen::VectorXd dual_test_coefficients(const ProblemDef& problem, const DualField& dual, int m,
                                       const TestLayout& layout) {
  const TrialSpace& dspace = *dual.space;
  const Mesh& mesh = *dspace.mesh;

  if (dual.repr == DualField::Repr::Broken) {
    ElementSystem sys = element_system(problem, dspace, m, dual.p_test, LoadSpec::none());
    const Eigen::MatrixXd T = optimal_test(sys.G, sys.B);
    const std::vector<int> gids = dspace.element_dofs(m);
    Eigen::VectorXd dloc(gids.size());
    for (size_t k = 0; k < gids.size(); ++k) dloc[k] = dual.coeffs[gids[k]];
    return T * dloc;
  }

  // Conforming field: nodal interpolation is exact, the pair has degree
  // p_dual on each element.
  const auto nodes = lagrange_nodes(mesh.cell_type, dual.p_dual);
  const FieldValues fv = eval_field(dspace, dual.coeffs, m, nodes);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(layout.n_total());
  for (int a = 0; a < layout.n_scalar(); ++a) c[a] = fv.u[layout.active[a]];
  for (int k = 0; k < layout.n_node; ++k) {
    c[layout.n_scalar() + k] = fv.q(0, k);
    c[layout.n_scalar() + layout.n_node + k] = fv.q(1, k);
  }
  return c;
}

} // namespace

std::vector<double> element_indicators(const ProblemDef& problem, const TrialSpace& primal_space,
                                       const Eigen::VectorXd& primal_sol,
                                       const DualField& dual) {
  const Mesh& mesh = *primal_space.mesh;
  std::vector<double> eps(mesh.num_elems());
  parallel_for(mesh.num_elems(), [&](int m) {
    const Eigen::VectorXd r = local_residual(problem, primal_space, m, dual.p_test, primal_sol);
    const TestLayout layout =
        make_test_layout(mesh, m, dual.p_test, problem.direction == Direction::Dual);
    const Eigen::VectorXd c = dual_test_coefficients(problem, dual, m, layout);
    eps[m] = c.dot(r);
  });
  return eps;
}

double residual_pairing(const ProblemDef& problem, const TrialSpace& primal_space,
                        const Eigen::VectorXd& primal_sol, const DualField& dual) {
  const auto eps = element_indicators(problem, primal_space, primal_sol, dual);
  double sum = 0.0;
  for (double e : eps) sum += e;
  return sum;
}

std::optional<double> effectivity(double estimate, double exact_error) {
  if (exact_error == 0.0) return std::nullopt;
  return estimate / exact_error;
}

std::string EstimateReport::csv_row(bool with_flux_error) const {
  char buf[256];
  if (with_flux_error) {
    std::snprintf(buf, sizeof(buf), "%d,%.4e,%.4e,%d,%.4e,%.4e", primal_dofs, qoi_error,
                  flux_l2_error, dual_dofs, eta, eff ? *eff : std::nan(""));
  } else {
    std::snprintf(buf, sizeof(buf), "%d,%.4e,%d,%.4e,%.4e", primal_dofs, qoi_error, dual_dofs,
                  eta, eff ? *eff : std::nan(""));
  }
  return buf;
}

} // namespace avsfe
