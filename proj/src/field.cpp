#include "avsfe/field.hpp"

#include <cmath>

#include "avsfe/quadrature.hpp"

namespace avsfe {

FieldValues eval_field(const TrialSpace& space, const Eigen::VectorXd& coeffs, int m,
                       const std::vector<Eigen::Vector2d>& ref) {
  const Mesh& mesh = *space.mesh;
  const ElementMap map = element_map(mesh, m);
  const int np = static_cast<int>(ref.size());
  const BasisSet bs = lagrange_basis(mesh.cell_type, space.degree, ref);
  const auto& sdofs = space.elem_scalar[m];
  const int nn = static_cast<int>(sdofs.size());

  Eigen::VectorXd cu(nn);
  for (int k = 0; k < nn; ++k) cu[k] = coeffs[sdofs[k]];

  FieldValues out;
  out.u = bs.val.transpose() * cu;
  out.grad_u.resize(2, np);
  out.q.resize(2, np);

  for (int q = 0; q < np; ++q) {
    const Eigen::Matrix2d JinvT = map.jacobian(ref[q]).inverse().transpose();
    const Eigen::Vector2d gref(bs.dx.col(q).dot(cu), bs.dy.col(q).dot(cu));
    out.grad_u.col(q) = JinvT * gref;
  }

  if (space.flux == FluxFamily::C0) {
    Eigen::VectorXd cx(nn), cy(nn);
    for (int k = 0; k < nn; ++k) {
      cx[k] = coeffs[space.n_scalar + sdofs[k]];
      cy[k] = coeffs[2 * space.n_scalar + sdofs[k]];
    }
    out.q.row(0) = (bs.val.transpose() * cx).transpose();
    out.q.row(1) = (bs.val.transpose() * cy).transpose();
  } else {
    std::vector<Eigen::Vector2d> phys(np);
    for (int q = 0; q < np; ++q) phys[q] = map.to_phys(ref[q]);
    Eigen::MatrixXd vx, vy;
    space.rt[m]->eval(phys, vx, vy);
    const auto& fdofs = space.elem_flux[m];
    Eigen::VectorXd cf(fdofs.size());
    for (size_t k = 0; k < fdofs.size(); ++k) cf[k] = coeffs[space.n_scalar + fdofs[k]];
    out.q.row(0) = (vx.transpose() * cf).transpose();
    out.q.row(1) = (vy.transpose() * cf).transpose();
  }
  return out;
}

namespace {

template <class F>
double l2_accumulate(const TrialSpace& space, const Eigen::VectorXd& coeffs, F&& err2) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule rule = quadrature(mesh.cell_type, 2 * space.degree + 4);
  double total = 0.0;
  for (int m = 0; m < mesh.num_elems(); ++m) {
    const ElementMap map = element_map(mesh, m);
    const FieldValues fv = eval_field(space, coeffs, m, rule.points);
    for (int q = 0; q < rule.size(); ++q) {
      const double detJ = std::abs(map.jacobian(rule.points[q]).determinant());
      total += rule.weights[q] * detJ * err2(map.to_phys(rule.points[q]), fv, q);
    }
  }
  return std::sqrt(total);
}

} // namespace

double l2_error_u(const TrialSpace& space, const Eigen::VectorXd& coeffs,
                  const ScalarField& exact_u) {
  return l2_accumulate(space, coeffs,
                       [&](const Eigen::Vector2d& x, const FieldValues& fv, int q) {
                         const double d = fv.u[q] - exact_u(x);
                         return d * d;
                       });
}

double l2_error_flux(const TrialSpace& space, const Eigen::VectorXd& coeffs,
                     const VectorField& exact_q) {
  return l2_accumulate(space, coeffs,
                       [&](const Eigen::Vector2d& x, const FieldValues& fv, int q) {
                         return (fv.q.col(q) - exact_q(x)).squaredNorm();
                       });
}

} // namespace avsfe
