#pragma once

#include <Eigen/Dense>
#include <array>

#include "avsfe/mesh.hpp"

namespace avsfe {

// Reference-to-physical map of one element: affine for triangles, bilinear
// for quadrilaterals. Reference cells match quadrature.hpp.
struct ElementMap {
  CellType type;
  std::array<Eigen::Vector2d, 4> c;

  Eigen::Vector2d to_phys(const Eigen::Vector2d& r) const;
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& r) const;
  Eigen::Vector2d to_ref(const Eigen::Vector2d& x) const;
};

ElementMap element_map(const Mesh& mesh, int m);

// Reference coordinates of the 1D edge parameterization t in [0,1] along
// local side s (from vertex s to vertex s+1).
Eigen::Vector2d side_ref_point(CellType type, int s, double t);

} // namespace avsfe
