#include "avsfe/qoi.hpp"

#include <cmath>
#include <stdexcept>

#include "avsfe/quadrature.hpp"

namespace avsfe {

double QoIDef::measure() const {
  if (is_line()) return (b - a).norm();
  return (b.x() - a.x()) * (b.y() - a.y());
}

void QoIDef::validate() const {
  if (is_line()) {
    if ((b - a).norm() <= 0.0) throw std::invalid_argument("QoIDef: zero-length segment");
  } else if (b.x() <= a.x() || b.y() <= a.y()) {
    throw std::invalid_argument("QoIDef: region must have positive area");
  }
}

std::vector<Eigen::Vector2d> clip_polygon_rect(const std::vector<Eigen::Vector2d>& poly,
                                               const Eigen::Vector2d& lo,
                                               const Eigen::Vector2d& hi) {
  // Sutherland-Hodgman, one half-plane at a time. inside(p) <= 0 keeps p.
  auto clip_half = [](const std::vector<Eigen::Vector2d>& in,
                      auto&& dist) {
    std::vector<Eigen::Vector2d> out;
    const int n = static_cast<int>(in.size());
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d& p = in[i];
      const Eigen::Vector2d& q = in[(i + 1) % n];
      const double dp = dist(p), dq = dist(q);
      if (dp <= 0.0) out.push_back(p);
      if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0))
        out.push_back(p + dp / (dp - dq) * (q - p));
    }
    return out;
  };
  auto result = clip_half(poly, [&](const Eigen::Vector2d& p) { return lo.x() - p.x(); });
  result = clip_half(result, [&](const Eigen::Vector2d& p) { return p.x() - hi.x(); });
  result = clip_half(result, [&](const Eigen::Vector2d& p) { return lo.y() - p.y(); });
  result = clip_half(result, [&](const Eigen::Vector2d& p) { return p.y() - hi.y(); });
  return result;
}

QoIQuad qoi_element_quadrature(const Mesh& mesh, int m, const QoIDef& qoi, int order) {
  QoIQuad out;
  const ElementMap map = element_map(mesh, m);

  if (qoi.is_line()) {
    const Eigen::Vector2d d = qoi.b - qoi.a;
    const double len2 = d.squaredNorm();
    const EdgeRule er = edge_quadrature(order);
    const int nv = mesh.verts_per_elem();
    for (int s = 0; s < nv; ++s) {
      if (!mesh.edges[mesh.elem_edges[m][s]].boundary()) continue;
      const Eigen::Vector2d p0 = mesh.vertex_of(m, s);
      const Eigen::Vector2d p1 = mesh.vertex_of(m, (s + 1) % nv);
      // Both endpoints on the segment's carrier line?
      auto offline = [&](const Eigen::Vector2d& p) {
        const Eigen::Vector2d r = p - qoi.a;
        return std::abs(r.x() * d.y() - r.y() * d.x()) / std::sqrt(len2) > 1e-10;
      };
      if (offline(p0) || offline(p1)) continue;
      double t0 = (p0 - qoi.a).dot(d) / len2;
      double t1 = (p1 - qoi.a).dot(d) / len2;
      if (t0 > t1) std::swap(t0, t1);
      const double lo = std::max(0.0, t0), hi = std::min(1.0, t1);
      if (hi - lo < 1e-14) continue;
      for (int q = 0; q < er.size(); ++q) {
        const double t = lo + (hi - lo) * er.points[q];
        const Eigen::Vector2d x = qoi.a + t * d;
        out.phys.push_back(x);
        out.ref.push_back(map.to_ref(x));
        out.w.push_back(er.weights[q] * (hi - lo) * std::sqrt(len2));
      }
    }
    return out;
  }

  std::vector<Eigen::Vector2d> poly;
  for (int k = 0; k < mesh.verts_per_elem(); ++k) poly.push_back(mesh.vertex_of(m, k));
  const auto clipped = clip_polygon_rect(poly, qoi.a, qoi.b);
  if (clipped.size() < 3) return out;

  const QuadratureRule rule = quadrature(CellType::Tri, order);
  for (size_t k = 1; k + 1 < clipped.size(); ++k) {
    const Eigen::Vector2d& v0 = clipped[0];
    const Eigen::Vector2d& v1 = clipped[k];
    const Eigen::Vector2d& v2 = clipped[k + 1];
    const double det = (v1.x() - v0.x()) * (v2.y() - v0.y()) - (v2.x() - v0.x()) * (v1.y() - v0.y());
    if (std::abs(det) < 1e-15) continue;
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x =
          v0 + rule.points[q].x() * (v1 - v0) + rule.points[q].y() * (v2 - v0);
      out.phys.push_back(x);
      out.ref.push_back(map.to_ref(x));
      out.w.push_back(rule.weights[q] * std::abs(det));
    }
  }
  return out;
}

double qoi_apply(const QoIDef& qoi, const TrialSpace& space, const Eigen::VectorXd& coeffs) {
  qoi.validate();
  const Mesh& mesh = *space.mesh;
  const int order = 2 * space.degree + 4;
  double integral = 0.0;
  double covered = 0.0;
  for (int m = 0; m < mesh.num_elems(); ++m) {
    const QoIQuad pts = qoi_element_quadrature(mesh, m, qoi, order);
    if (pts.size() == 0) continue;
    const FieldValues fv = eval_field(space, coeffs, m, pts.ref);
    for (int q = 0; q < pts.size(); ++q) {
      covered += pts.w[q];
      switch (qoi.kind) {
        case QoIKind::AvgU: integral += pts.w[q] * fv.u[q]; break;
        case QoIKind::AvgDuDx: integral += pts.w[q] * fv.grad_u(0, q); break;
        case QoIKind::AvgQx:
        case QoIKind::LineAvgQx: integral += pts.w[q] * fv.q(0, q); break;
      }
    }
  }
  const double meas = qoi.measure();
  if (std::abs(covered - meas) > 1e-8 * meas)
    throw std::runtime_error("qoi_apply: region is not covered by the mesh");
  return qoi.scale * integral / meas;
}

Eigen::VectorXd qoi_trial_vector(const QoIDef& qoi, const TrialSpace& space) {
  qoi.validate();
  const Mesh& mesh = *space.mesh;
  const int order = 2 * space.degree + 4;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.total_dofs());
  const double factor = qoi.scale / qoi.measure();

  for (int m = 0; m < mesh.num_elems(); ++m) {
    const QoIQuad pts = qoi_element_quadrature(mesh, m, qoi, order);
    if (pts.size() == 0) continue;
    const ElementMap map = element_map(mesh, m);
    const BasisSet bs = lagrange_basis(mesh.cell_type, space.degree, pts.ref);
    const auto& sdofs = space.elem_scalar[m];

    switch (qoi.kind) {
      case QoIKind::AvgU:
        for (int q = 0; q < pts.size(); ++q)
          for (size_t k = 0; k < sdofs.size(); ++k)
            rhs[sdofs[k]] += factor * pts.w[q] * bs.val(k, q);
        break;
      case QoIKind::AvgDuDx:
        for (int q = 0; q < pts.size(); ++q) {
          const Eigen::Matrix2d JinvT = map.jacobian(pts.ref[q]).inverse().transpose();
          for (size_t k = 0; k < sdofs.size(); ++k) {
            const double gx = JinvT(0, 0) * bs.dx(k, q) + JinvT(0, 1) * bs.dy(k, q);
            rhs[sdofs[k]] += factor * pts.w[q] * gx;
          }
        }
        break;
      case QoIKind::AvgQx:
      case QoIKind::LineAvgQx:
        if (space.flux == FluxFamily::C0) {
          for (int q = 0; q < pts.size(); ++q)
            for (size_t k = 0; k < sdofs.size(); ++k)
              rhs[space.n_scalar + sdofs[k]] += factor * pts.w[q] * bs.val(k, q);
        } else {
          Eigen::MatrixXd vx, vy;
          space.rt[m]->eval(pts.phys, vx, vy);
          const auto& fdofs = space.elem_flux[m];
          for (int q = 0; q < pts.size(); ++q)
            for (size_t k = 0; k < fdofs.size(); ++k)
              rhs[space.n_scalar + fdofs[k]] += factor * pts.w[q] * vx(k, q);
        }
        break;
    }
  }
  return rhs;
}

} // namespace avsfe
