#include "avsfe/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace avsfe {

namespace {
constexpr int kMaxPoints1D = 24; // supports order <= 47 per direction
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1 || n > kMaxPoints1D) {
    throw std::invalid_argument("gauss_legendre: unsupported point count " + std::to_string(n));
  }
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int mid = (n + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

QuadratureRule quadrature(CellType type, int order) {
  if (order < 1) throw std::invalid_argument("quadrature: order must be >= 1");
  QuadratureRule rule;
  if (type == CellType::Quad) {
    const int n = order / 2 + 1;
    if (n > kMaxPoints1D) throw std::invalid_argument("quadrature: order too large");
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        rule.points.emplace_back(x[i], x[j]);
        rule.weights.push_back(w[i] * w[j]);
      }
    }
  } else {
    // Collapsed tensor rule: (s,t) in [0,1]^2 -> (s(1-t), t), Jacobian (1-t).
    // Exact for total degree <= order with the extra point in t.
    const int ns = order / 2 + 1;
    const int nt = (order + 1) / 2 + 1;
    if (ns > kMaxPoints1D || nt > kMaxPoints1D)
      throw std::invalid_argument("quadrature: order too large");
    std::vector<double> xs, ws, xt, wt;
    gauss_legendre(ns, xs, ws);
    gauss_legendre(nt, xt, wt);
    for (int j = 0; j < nt; ++j) {
      const double t = 0.5 * (xt[j] + 1.0);
      for (int i = 0; i < ns; ++i) {
        const double s = 0.5 * (xs[i] + 1.0);
        rule.points.emplace_back(s * (1.0 - t), t);
        rule.weights.push_back(0.25 * ws[i] * wt[j] * (1.0 - t));
      }
    }
  }
  return rule;
}

EdgeRule edge_quadrature(int order) {
  if (order < 1) throw std::invalid_argument("edge_quadrature: order must be >= 1");
  const int n = order / 2 + 1;
  if (n > kMaxPoints1D) throw std::invalid_argument("edge_quadrature: order too large");
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  EdgeRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

} // namespace avsfe
