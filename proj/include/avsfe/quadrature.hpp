#pragma once

#include <Eigen/Dense>
#include <vector>

namespace avsfe {

enum class CellType { Tri, Quad };

// Reference cells: Quad = [-1,1]^2, Tri = {(0,0),(1,0),(0,1)}.
struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

// 1D rule on [0,1].
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Rule exact for polynomials of total degree <= order on the reference cell.
QuadratureRule quadrature(CellType type, int order);

// Rule exact for 1D polynomials of degree <= order on [0,1].
EdgeRule edge_quadrature(int order);

} // namespace avsfe
