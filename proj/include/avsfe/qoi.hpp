#pragma once

#include <Eigen/Dense>
#include <vector>

#include "avsfe/field.hpp"
#include "avsfe/spaces.hpp"

namespace avsfe {

enum class QoIKind { AvgU, AvgDuDx, AvgQx, LineAvgQx };

// Continuous linear functional on (u, q): region average of u, of du/dx, of
// q_x, or a boundary-segment average of q_x. Volume regions are axis-aligned
// rectangles that need not align with element boundaries.
struct QoIDef {
  QoIKind kind = QoIKind::AvgU;
  Eigen::Vector2d a{0.5, 0.5}; // rect lower corner, or segment start
  Eigen::Vector2d b{1.0, 1.0}; // rect upper corner, or segment end
  double scale = 1.0;          // functional multiplier (linearity experiments)

  bool is_line() const { return kind == QoIKind::LineAvgQx; }
  double measure() const;
  void validate() const;
};

// Quadrature points of one element restricted to the QoI region: exact
// polygon clipping for volume kinds, boundary-segment overlap for the line
// kind. Weights carry the physical measure.
struct QoIQuad {
  std::vector<Eigen::Vector2d> ref;
  std::vector<Eigen::Vector2d> phys;
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
};

QoIQuad qoi_element_quadrature(const Mesh& mesh, int m, const QoIDef& qoi, int order);

double qoi_apply(const QoIDef& qoi, const TrialSpace& space, const Eigen::VectorXd& coeffs);

// Q evaluated on every trial basis pair (right-hand side of the classical
// dual system).
Eigen::VectorXd qoi_trial_vector(const QoIDef& qoi, const TrialSpace& space);

// Clips a convex CCW polygon against an axis-aligned rectangle.
std::vector<Eigen::Vector2d> clip_polygon_rect(const std::vector<Eigen::Vector2d>& poly,
                                               const Eigen::Vector2d& lo,
                                               const Eigen::Vector2d& hi);

} // namespace avsfe
