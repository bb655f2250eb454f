#include "avsfe/map.hpp"

#include <stdexcept>

namespace avsfe {

Eigen::Vector2d ElementMap::to_phys(const Eigen::Vector2d& r) const {
  if (type == CellType::Tri) {
    return c[0] + r.x() * (c[1] - c[0]) + r.y() * (c[2] - c[0]);
  }
  const double xi = r.x(), eta = r.y();
  return 0.25 * ((1 - xi) * (1 - eta) * c[0] + (1 + xi) * (1 - eta) * c[1] +
                 (1 + xi) * (1 + eta) * c[2] + (1 - xi) * (1 + eta) * c[3]);
}

Eigen::Matrix2d ElementMap::jacobian(const Eigen::Vector2d& r) const {
  Eigen::Matrix2d J;
  if (type == CellType::Tri) {
    J.col(0) = c[1] - c[0];
    J.col(1) = c[2] - c[0];
    return J;
  }
  const double xi = r.x(), eta = r.y();
  J.col(0) = 0.25 * (-(1 - eta) * c[0] + (1 - eta) * c[1] + (1 + eta) * c[2] - (1 + eta) * c[3]);
  J.col(1) = 0.25 * (-(1 - xi) * c[0] - (1 + xi) * c[1] + (1 + xi) * c[2] + (1 - xi) * c[3]);
  return J;
}

Eigen::Vector2d ElementMap::to_ref(const Eigen::Vector2d& x) const {
  if (type == CellType::Tri) {
    Eigen::Matrix2d J;
    J.col(0) = c[1] - c[0];
    J.col(1) = c[2] - c[0];
    return J.inverse() * (x - c[0]);
  }
  Eigen::Vector2d r(0.0, 0.0);
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector2d res = to_phys(r) - x;
    if (res.norm() < 1e-14) break;
    r -= jacobian(r).inverse() * res;
  }
  return r;
}

ElementMap element_map(const Mesh& mesh, int m) {
  ElementMap map;
  map.type = mesh.cell_type;
  for (int k = 0; k < mesh.verts_per_elem(); ++k) map.c[k] = mesh.vertex_of(m, k);
  return map;
}

Eigen::Vector2d side_ref_point(CellType type, int s, double t) {
  if (type == CellType::Quad) {
    switch (s) {
      case 0: return {-1.0 + 2.0 * t, -1.0};
      case 1: return {1.0, -1.0 + 2.0 * t};
      case 2: return {1.0 - 2.0 * t, 1.0};
      case 3: return {-1.0, 1.0 - 2.0 * t};
    }
  } else {
    switch (s) {
      case 0: return {t, 0.0};
      case 1: return {1.0 - t, t};
      case 2: return {0.0, 1.0 - t};
    }
  }
  throw std::invalid_argument("side_ref_point: bad side index");
}

} // namespace avsfe
