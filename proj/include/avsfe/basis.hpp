#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "avsfe/quadrature.hpp"

namespace avsfe {

// Scalar nodal basis tabulated at a point set. Rows index basis functions,
// columns index points. Derivatives are with respect to reference coordinates.
struct BasisSet {
  Eigen::MatrixXd val;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

int lagrange_dim(CellType type, int p);

// Reference node locations. Quad: lexicographic over a (p+1)x(p+1) grid on
// [-1,1]^2. Tri: rows j=0..p of barycentric-equispaced points (i/p, j/p).
std::vector<Eigen::Vector2d> lagrange_nodes(CellType type, int p);

BasisSet lagrange_basis(CellType type, int p, const std::vector<Eigen::Vector2d>& points);

// Node classification used by the C0 dof maps and the broken test-space
// boundary constraints. Sides are numbered by their start vertex; side_index
// runs 0..p-2 along the local side direction.
struct NodeClass {
  enum Kind { Vertex, Side, Interior };
  Kind kind;
  int entity;     // vertex id, side id, or interior counter
  int side_index; // valid for Kind::Side
};

std::vector<NodeClass> classify_nodes(CellType type, int p);

// Raviart-Thomas space of index p on a (physical) triangle: p edge-normal
// moments per edge plus p(p-1) interior moments, dim p(p+2). The basis is
// constructed dual to moments taken in a caller-provided edge frame so that
// neighboring elements sharing an edge frame produce a normal-continuous
// global field with no orientation bookkeeping at assembly time.
struct RTEdgeFrame {
  Eigen::Vector2d a; // parameterization start (s=0)
  Eigen::Vector2d b; // parameterization end (s=1)
  Eigen::Vector2d n; // fixed unit normal the moments are taken against
};

class RTSpace {
 public:
  RTSpace(const std::array<Eigen::Vector2d, 3>& verts,
          const std::array<RTEdgeFrame, 3>& frames, int p);

  int index() const { return p_; }
  int dim() const { return p_ * (p_ + 2); }

  // Physical-coordinate evaluation; matrices are (dim x npoints).
  void eval(const std::vector<Eigen::Vector2d>& points,
            Eigen::MatrixXd& vx, Eigen::MatrixXd& vy) const;
  void eval_div(const std::vector<Eigen::Vector2d>& points, Eigen::MatrixXd& div) const;

 private:
  int p_;
  Eigen::Vector2d x0_;
  double scale_;
  Eigen::MatrixXd coef_; // dim x n_monomials, dual basis in scaled monomials
  int n_poly_;           // dim of P_{p-1}

  void monomials(const Eigen::Vector2d& pt, Eigen::VectorXd& mx, Eigen::VectorXd& my,
                 Eigen::VectorXd& mdiv) const;
};

// Reference-triangle RT basis with outward normals and counter-clockwise edge
// parameterization (spec-facing wrapper around RTSpace).
RTSpace rt_reference_space(int p);

} // namespace avsfe
