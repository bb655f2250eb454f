#pragma once

#include <Eigen/Sparse>
#include <string>

#include "avsfe/problem.hpp"
#include "avsfe/qoi.hpp"
#include "avsfe/spaces.hpp"

namespace avsfe {

// Local operators of one element: Gram matrix of the broken V inner product
// on the enriched test basis, trial-by-test bilinear values, and the load
// against the test basis. Test basis layout: active scalar nodes, then the
// w_x and w_y nodal blocks.
struct ElementSystem {
  Eigen::MatrixXd G;
  Eigen::MatrixXd B;
  Eigen::VectorXd f;
  TestLayout layout;
};

// Right-hand side selector: the problem's (f, g) data, or a QoI functional
// applied to the test pair (dual loads), or none.
struct LoadSpec {
  enum class Kind { None, Source, QoI };
  Kind kind = Kind::Source;
  const QoIDef* qoi = nullptr;

  static LoadSpec none() { return {Kind::None, nullptr}; }
  static LoadSpec source() { return {Kind::Source, nullptr}; }
  static LoadSpec qoi_load(const QoIDef& q) { return {Kind::QoI, &q}; }
};

int volume_quadrature_order(int p_trial, int p_test);

ElementSystem element_system(const ProblemDef& problem, const TrialSpace& space, int m,
                             int p_test, const LoadSpec& load);

Eigen::MatrixXd local_gram(const Mesh& mesh, int m, const TestLayout& layout);
Eigen::MatrixXd local_bilinear(const ProblemDef& problem, const TrialSpace& space, int m,
                               const TestLayout& layout);

// T = G^{-1} B^T via Cholesky; column i holds the enriched-basis coefficients
// of the optimal test function of local trial dof i.
Eigen::MatrixXd optimal_test(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B);

struct SparseSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd F;
  std::vector<char> constrained; // per-dof homogeneous Dirichlet flags
  int dim() const { return static_cast<int>(F.size()); }
};

// Normal-equation assembly K = sum_m B G^{-1} B^T, F = sum_m T^T f, with the
// scalar trial dofs on the constrained boundary eliminated symmetrically.
SparseSystem assemble(const ProblemDef& problem, const TrialSpace& space, int p_test,
                      const LoadSpec& load = LoadSpec::source());

Eigen::VectorXd solve_spd(const SparseSystem& system);

// f_loc - B^T u_loc against the degree-p_test broken test basis.
Eigen::VectorXd local_residual(const ProblemDef& problem, const TrialSpace& space, int m,
                               int p_test, const Eigen::VectorXd& sol);

// Built-in energy norm of the residual: sqrt(sum_m r_m^T G_m^{-1} r_m).
double energy_residual_norm(const ProblemDef& problem, const TrialSpace& space,
                            const Eigen::VectorXd& sol, int p_test);

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& K);

} // namespace avsfe
