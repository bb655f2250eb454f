#include "avsfe/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace avsfe {

namespace {

// 1D Lagrange basis at equispaced nodes on [-1,1].
void lagrange_1d(int p, double x, Eigen::VectorXd& val, Eigen::VectorXd& der) {
  const int n = p + 1;
  Eigen::VectorXd nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = -1.0 + 2.0 * k / p;
  if (p == 0) {
    val = Eigen::VectorXd::Ones(1);
    der = Eigen::VectorXd::Zero(1);
    return;
  }
  val.resize(n);
  der.resize(n);
  for (int k = 0; k < n; ++k) {
    double v = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      v *= (x - nodes[j]) / (nodes[k] - nodes[j]);
    }
    val[k] = v;
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      double t = 1.0 / (nodes[k] - nodes[i]);
      for (int j = 0; j < n; ++j) {
        if (j == k || j == i) continue;
        t *= (x - nodes[j]) / (nodes[k] - nodes[j]);
      }
      d += t;
    }
    der[k] = d;
  }
}

// Monomial exponents for P_p on the triangle, graded order.
std::vector<std::pair<int, int>> tri_monomials(int p) {
  std::vector<std::pair<int, int>> e;
  for (int d = 0; d <= p; ++d)
    for (int a = d; a >= 0; --a) e.emplace_back(a, d - a);
  return e;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Coefficients of the triangle nodal basis in the monomial basis, cached per degree.
const Eigen::MatrixXd& tri_nodal_coeffs(int p) {
  static std::array<Eigen::MatrixXd, 5> cache;
  Eigen::MatrixXd& C = cache.at(p);
  if (C.size() == 0) {
    const auto nodes = lagrange_nodes(CellType::Tri, p);
    const auto mono = tri_monomials(p);
    const int n = static_cast<int>(nodes.size());
    Eigen::MatrixXd V(n, n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        V(k, j) = ipow(nodes[k].x(), mono[j].first) * ipow(nodes[k].y(), mono[j].second);
    C = V.fullPivLu().inverse().transpose();
  }
  return C;
}

// Shifted Legendre P_k(2s-1) on [0,1].
double shifted_legendre(int k, double s) {
  const double z = 2.0 * s - 1.0;
  double p0 = 1.0, p1 = z;
  if (k == 0) return p0;
  if (k == 1) return p1;
  for (int j = 1; j < k; ++j) {
    double p2 = ((2.0 * j + 1.0) * z * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

} // namespace

int lagrange_dim(CellType type, int p) {
  return type == CellType::Quad ? (p + 1) * (p + 1) : (p + 1) * (p + 2) / 2;
}

std::vector<Eigen::Vector2d> lagrange_nodes(CellType type, int p) {
  if (p < 1 || p > 4) throw std::invalid_argument("lagrange_nodes: degree must be in [1,4]");
  std::vector<Eigen::Vector2d> nodes;
  if (type == CellType::Quad) {
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i)
        nodes.emplace_back(-1.0 + 2.0 * i / p, -1.0 + 2.0 * j / p);
  } else {
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p - j; ++i)
        nodes.emplace_back(static_cast<double>(i) / p, static_cast<double>(j) / p);
  }
  return nodes;
}

BasisSet lagrange_basis(CellType type, int p, const std::vector<Eigen::Vector2d>& points) {
  if (p < 1 || p > 4) throw std::invalid_argument("lagrange_basis: degree must be in [1,4]");
  const int n = lagrange_dim(type, p);
  const int np = static_cast<int>(points.size());
  BasisSet bs;
  bs.val.resize(n, np);
  bs.dx.resize(n, np);
  bs.dy.resize(n, np);
  if (type == CellType::Quad) {
    Eigen::VectorXd lx, dlx, ly, dly;
    for (int q = 0; q < np; ++q) {
      lagrange_1d(p, points[q].x(), lx, dlx);
      lagrange_1d(p, points[q].y(), ly, dly);
      for (int j = 0; j <= p; ++j) {
        for (int i = 0; i <= p; ++i) {
          const int k = j * (p + 1) + i;
          bs.val(k, q) = lx[i] * ly[j];
          bs.dx(k, q) = dlx[i] * ly[j];
          bs.dy(k, q) = lx[i] * dly[j];
        }
      }
    }
  } else {
    const Eigen::MatrixXd& C = tri_nodal_coeffs(p);
    const auto mono = tri_monomials(p);
    const int nm = static_cast<int>(mono.size());
    Eigen::VectorXd m(nm), mx(nm), my(nm);
    for (int q = 0; q < np; ++q) {
      const double x = points[q].x(), y = points[q].y();
      for (int j = 0; j < nm; ++j) {
        const int a = mono[j].first, b = mono[j].second;
        m[j] = ipow(x, a) * ipow(y, b);
        mx[j] = a > 0 ? a * ipow(x, a - 1) * ipow(y, b) : 0.0;
        my[j] = b > 0 ? b * ipow(x, a) * ipow(y, b - 1) : 0.0;
      }
      bs.val.col(q) = C * m;
      bs.dx.col(q) = C * mx;
      bs.dy.col(q) = C * my;
    }
  }
  return bs;
}

std::vector<NodeClass> classify_nodes(CellType type, int p) {
  std::vector<NodeClass> cls;
  int interior = 0;
  if (type == CellType::Quad) {
    for (int j = 0; j <= p; ++j) {
      for (int i = 0; i <= p; ++i) {
        NodeClass c{};
        if ((i == 0 || i == p) && (j == 0 || j == p)) {
          c.kind = NodeClass::Vertex;
          c.entity = (j == 0) ? (i == 0 ? 0 : 1) : (i == p ? 2 : 3);
        } else if (j == 0) {
          c = {NodeClass::Side, 0, i - 1};
        } else if (i == p) {
          c = {NodeClass::Side, 1, j - 1};
        } else if (j == p) {
          c = {NodeClass::Side, 2, p - i - 1};
        } else if (i == 0) {
          c = {NodeClass::Side, 3, p - j - 1};
        } else {
          c = {NodeClass::Interior, interior++, 0};
        }
        cls.push_back(c);
      }
    }
  } else {
    for (int j = 0; j <= p; ++j) {
      for (int i = 0; i <= p - j; ++i) {
        NodeClass c{};
        if (i == 0 && j == 0) {
          c = {NodeClass::Vertex, 0, 0};
        } else if (i == p && j == 0) {
          c = {NodeClass::Vertex, 1, 0};
        } else if (i == 0 && j == p) {
          c = {NodeClass::Vertex, 2, 0};
        } else if (j == 0) {
          c = {NodeClass::Side, 0, i - 1};
        } else if (i + j == p) {
          c = {NodeClass::Side, 1, j - 1};
        } else if (i == 0) {
          c = {NodeClass::Side, 2, p - j - 1};
        } else {
          c = {NodeClass::Interior, interior++, 0};
        }
        cls.push_back(c);
      }
    }
  }
  return cls;
}

RTSpace::RTSpace(const std::array<Eigen::Vector2d, 3>& verts,
                 const std::array<RTEdgeFrame, 3>& frames, int p)
    : p_(p) {
  if (p < 1 || p > 3) throw std::invalid_argument("RTSpace: index must be in [1,3]");
  x0_ = (verts[0] + verts[1] + verts[2]) / 3.0;
  scale_ = std::max({(verts[1] - verts[0]).norm(), (verts[2] - verts[1]).norm(),
                     (verts[0] - verts[2]).norm()});
  n_poly_ = p * (p + 1) / 2; // dim P_{p-1}

  const int nd = dim();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nd, nd);

  // Edge moments against shifted Legendre in the frame parameterization.
  EdgeRule er = edge_quadrature(2 * p + 2);
  Eigen::VectorXd fx(nd), fy(nd), fdiv(nd);
  int row = 0;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d& a = frames[e].a;
    const Eigen::Vector2d& b = frames[e].b;
    const double len = (b - a).norm();
    for (int k = 0; k < p; ++k, ++row) {
      for (int q = 0; q < er.size(); ++q) {
        const double s = er.points[q];
        monomials(a + s * (b - a), fx, fy, fdiv);
        const double w = er.weights[q] * len * shifted_legendre(k, s);
        for (int j = 0; j < nd; ++j)
          M(row, j) += w * (fx[j] * frames[e].n.x() + fy[j] * frames[e].n.y());
      }
    }
  }

  // Interior moments against P_{p-2} per component.
  if (p >= 2) {
    QuadratureRule vr = quadrature(CellType::Tri, 2 * p + 2);
    const auto mono = tri_monomials(p - 2);
    const Eigen::Matrix2d J = (Eigen::Matrix2d() << verts[1] - verts[0], verts[2] - verts[0]).finished();
    const double detJ = J.determinant();
    for (int q = 0; q < vr.size(); ++q) {
      const Eigen::Vector2d xq =
          verts[0] + vr.points[q].x() * (verts[1] - verts[0]) + vr.points[q].y() * (verts[2] - verts[0]);
      monomials(xq, fx, fy, fdiv);
      const Eigen::Vector2d X = (xq - x0_) / scale_;
      const double w = vr.weights[q] * std::abs(detJ);
      int r = 3 * p;
      for (const auto& [ma, mb] : mono) {
        const double mv = ipow(X.x(), ma) * ipow(X.y(), mb);
        for (int j = 0; j < nd; ++j) {
          M(r, j) += w * mv * fx[j];
          M(r + 1, j) += w * mv * fy[j];
        }
        r += 2;
      }
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw std::runtime_error("RTSpace: singular moment matrix");
  coef_ = lu.inverse();
}

void RTSpace::monomials(const Eigen::Vector2d& pt, Eigen::VectorXd& mx, Eigen::VectorXd& my,
                        Eigen::VectorXd& mdiv) const {
  const Eigen::Vector2d X = (pt - x0_) / scale_;
  const auto mono = tri_monomials(p_ - 1);
  const int nd = dim();
  mx.resize(nd);
  my.resize(nd);
  mdiv.resize(nd);
  for (int j = 0; j < n_poly_; ++j) {
    const auto [a, b] = mono[j];
    const double m = ipow(X.x(), a) * ipow(X.y(), b);
    const double dmx = a > 0 ? a * ipow(X.x(), a - 1) * ipow(X.y(), b) / scale_ : 0.0;
    const double dmy = b > 0 ? b * ipow(X.x(), a) * ipow(X.y(), b - 1) / scale_ : 0.0;
    mx[j] = m;
    my[j] = 0.0;
    mdiv[j] = dmx;
    mx[n_poly_ + j] = 0.0;
    my[n_poly_ + j] = m;
    mdiv[n_poly_ + j] = dmy;
  }
  // X * (homogeneous degree p-1): divergence (p+1)/scale * h by Euler's identity.
  for (int c = 0; c < p_; ++c) {
    const double h = ipow(X.x(), c) * ipow(X.y(), p_ - 1 - c);
    mx[2 * n_poly_ + c] = X.x() * h;
    my[2 * n_poly_ + c] = X.y() * h;
    mdiv[2 * n_poly_ + c] = (p_ + 1) * h / scale_;
  }
}

void RTSpace::eval(const std::vector<Eigen::Vector2d>& points,
                   Eigen::MatrixXd& vx, Eigen::MatrixXd& vy) const {
  const int nd = dim();
  const int np = static_cast<int>(points.size());
  vx.resize(nd, np);
  vy.resize(nd, np);
  Eigen::VectorXd mx, my, md;
  for (int q = 0; q < np; ++q) {
    monomials(points[q], mx, my, md);
    vx.col(q) = coef_ * mx;
    vy.col(q) = coef_ * my;
  }
}

void RTSpace::eval_div(const std::vector<Eigen::Vector2d>& points, Eigen::MatrixXd& div) const {
  const int nd = dim();
  const int np = static_cast<int>(points.size());
  div.resize(nd, np);
  Eigen::VectorXd mx, my, md;
  for (int q = 0; q < np; ++q) {
    monomials(points[q], mx, my, md);
    div.col(q) = coef_ * md;
  }
}

RTSpace rt_reference_space(int p) {
  const std::array<Eigen::Vector2d, 3> v = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                            Eigen::Vector2d(0, 1)};
  std::array<RTEdgeFrame, 3> frames;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d a = v[e], b = v[(e + 1) % 3];
    Eigen::Vector2d t = (b - a).normalized();
    frames[e] = {a, b, Eigen::Vector2d(t.y(), -t.x())}; // outward for CCW vertices
  }
  return RTSpace(v, frames, p);
}

} // namespace avsfe
