#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace avsfe {

enum class Direction { Primal, Dual };

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

// Coefficients and data of the first-order convection-diffusion system. The
// direction flag selects the primal form B (trial (u,q), flux q = D grad u)
// or the dual form B-hat (trial (p,r), r = grad p, diffusion applied to r,
// convection sign flipped, pure Dirichlet boundary).
struct ProblemDef {
  Eigen::Matrix2d D = Eigen::Matrix2d::Identity();
  VectorField b;
  ScalarField f;          // volume source; unused by dual solves
  ScalarField g;          // Neumann data on Gamma_N; empty means none
  Direction direction = Direction::Primal;

  ScalarField exact_u;    // optional closed forms for verification
  VectorField exact_grad; // grad u

  bool has_exact() const { return static_cast<bool>(exact_u); }
  bool has_neumann() const { return static_cast<bool>(g); }

  void validate() const {
    if ((D - D.transpose()).norm() > 1e-12 * D.norm())
      throw std::invalid_argument("ProblemDef: diffusion tensor must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(D);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("ProblemDef: diffusion tensor must be positive definite");
    if (direction == Direction::Dual && has_neumann())
      throw std::invalid_argument("ProblemDef: dual problems are pure Dirichlet");
  }

  // The strong-form dual counterpart of a primal definition.
  ProblemDef dual() const {
    ProblemDef d;
    d.D = D;
    d.b = b;
    d.direction = Direction::Dual;
    return d;
  }
};

} // namespace avsfe
