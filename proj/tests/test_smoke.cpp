#include <doctest.h>

#include "avsfe/adapt.hpp"
#include "avsfe/runner.hpp"

using namespace avsfe;

// End-to-end sanity on the smallest Laplace setup before the detailed suites.
TEST_CASE("single quad Laplace solve runs and the system has 27 raw dofs") {
  const Benchmark bench = laplace_bump();
  const Mesh mesh = build_structured(CellType::Quad, 1);
  const TrialSpace space = make_trial_space(mesh, FluxFamily::C0, 2);
  CHECK(space.total_dofs() == 27);
  const SparseSystem sys = assemble(bench.problem, space, 2);
  CHECK(sys.dim() == 27);
  const Eigen::VectorXd sol = solve_spd(sys);
  CHECK(sol.size() == 27);
  CHECK(std::isfinite(sol.norm()));
}

TEST_CASE("alternative estimate on the 4x4 Laplace mesh lands near the paper row") {
  const Benchmark bench = laplace_bump();
  Mesh mesh = build_structured(CellType::Quad, 4);
  const TrialSpace space = make_trial_space(mesh, FluxFamily::C0, 2);
  const SparseSystem sys = assemble(bench.problem, space, 2);
  const Eigen::VectorXd sol = solve_spd(sys);
  const EstimateReport rep = estimate_step(bench, qoi_avg_u_quadrant(), space, sol, 3, false);
  CHECK(rep.primal_dofs == 243);
  CHECK(rep.dual_dofs == 507);
  MESSAGE("qoi_error=", rep.qoi_error, " eta=", rep.eta, " eff=", rep.eff ? *rep.eff : -999.0);
  CHECK(std::abs(rep.qoi_error - 1.8610e-02) < 0.1 * 1.8610e-02);
  REQUIRE(rep.eff.has_value());
  CHECK(std::abs(*rep.eff - 0.999) < 0.05);
}
