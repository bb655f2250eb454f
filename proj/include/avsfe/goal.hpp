#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avsfe/assembly.hpp"

namespace avsfe {

// Approximate dual solution for one QoI. Broken: coefficients over the
// per-element optimal test functions of the degree-p_dual trial space
// (classical approach). Conforming: a (p, r) trial field of degree p_dual
// solved from the strong-form dual problem (alternative approach).
struct DualField {
  enum class Repr { Broken, Conforming };
  Repr repr = Repr::Conforming;
  int p_dual = 2;
  int p_test = 2; // enriched degree its element restrictions live in
  std::shared_ptr<TrialSpace> space;
  Eigen::VectorXd coeffs;
  int reported_dofs() const { return space->total_dofs(); }
};

DualField classical_dual_solve(const ProblemDef& problem, const QoIDef& qoi,
                               const TrialSpace& primal_space, int p_dual, int delta_p = 0);

DualField alternative_dual_solve(const ProblemDef& problem, const QoIDef& qoi,
                                 const TrialSpace& primal_space, int p_dual, int delta_p = 0);

// Element restrictions of Res((u^h,q^h);(p^h,r^h)); their sum is the error
// estimate.
std::vector<double> element_indicators(const ProblemDef& problem, const TrialSpace& primal_space,
                                       const Eigen::VectorXd& primal_sol, const DualField& dual);

double residual_pairing(const ProblemDef& problem, const TrialSpace& primal_space,
                        const Eigen::VectorXd& primal_sol, const DualField& dual);

// eta / exact error; absent when the exact error vanishes.
std::optional<double> effectivity(double estimate, double exact_error);

// One verification-table row.
struct EstimateReport {
  int primal_dofs = 0;
  int dual_dofs = 0;
  double qoi_error = 0.0; // Q(u,q) - Q(u^h,q^h), NaN when no exact solution
  double eta = 0.0;
  std::optional<double> eff;
  std::vector<double> indicators;
  int elements = 0;
  double flux_l2_error = std::numeric_limits<double>::quiet_NaN();
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  std::string csv_row(bool with_flux_error = false) const;
};

} // namespace avsfe
