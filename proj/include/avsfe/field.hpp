#pragma once

#include <Eigen/Dense>
#include <vector>

#include "avsfe/map.hpp"
#include "avsfe/problem.hpp"
#include "avsfe/spaces.hpp"

namespace avsfe {

// Batched evaluation of a solved (u, q) field on one element at reference
// points. Gradients are physical.
struct FieldValues {
  Eigen::VectorXd u;
  Eigen::MatrixXd grad_u; // 2 x n
  Eigen::MatrixXd q;      // 2 x n
};

FieldValues eval_field(const TrialSpace& space, const Eigen::VectorXd& coeffs, int m,
                       const std::vector<Eigen::Vector2d>& ref);

// L2 norms of (u - u_exact) and (q - q_exact) over the mesh.
double l2_error_u(const TrialSpace& space, const Eigen::VectorXd& coeffs,
                  const ScalarField& exact_u);
double l2_error_flux(const TrialSpace& space, const Eigen::VectorXd& coeffs,
                     const VectorField& exact_q);

} // namespace avsfe
