#pragma once

#include <cmath>
#include <string>

#include "avsfe/problem.hpp"
#include "avsfe/qoi.hpp"

namespace avsfe {

// Exact solution of the Laplace verification problem,
// u = exp(50 (x^2-x)(y^2-y)) - 1 on the unit square. Templated on the scalar
// type so tests can differentiate it independently (complex step).
struct LaplaceBumpExact {
  template <class T>
  T u(T x, T y) const {
    using std::exp;
    return exp(50.0 * (x * x - x) * (y * y - y)) - 1.0;
  }
  template <class T>
  T ux(T x, T y) const {
    using std::exp;
    return 50.0 * (2.0 * x - 1.0) * (y * y - y) * exp(50.0 * (x * x - x) * (y * y - y));
  }
  template <class T>
  T uy(T x, T y) const {
    return ux(y, x);
  }
  double f(double x, double y) const {
    const double phix = 50.0 * (2.0 * x - 1.0) * (y * y - y);
    const double phiy = 50.0 * (x * x - x) * (2.0 * y - 1.0);
    const double phixx = 100.0 * (y * y - y);
    const double phiyy = 100.0 * (x * x - x);
    const double e = std::exp(50.0 * (x * x - x) * (y * y - y));
    return -(phixx + phix * phix + phiyy + phiy * phiy) * e;
  }
};

// One factor of the convection-diffusion product solution,
// g(t) = t + (e^{c t} - 1) / (1 - e^c), rearranged so that e^{c(t-1)} <= 1
// keeps evaluation finite for large positive c (Pe up to several hundred).
struct LayerFactor {
  double c = 1.0;

  template <class T>
  T value(T t) const {
    using std::exp;
    if (c > 0.0) {
      const double em = std::exp(-c);
      return t - (exp(c * (t - 1.0)) - em) / (1.0 - em);
    }
    return t + (exp(c * t) - 1.0) / (1.0 - std::exp(c));
  }
  template <class T>
  T deriv(T t) const {
    using std::exp;
    if (c > 0.0) return T(1.0) - c * exp(c * (t - 1.0)) / (1.0 - std::exp(-c));
    return T(1.0) + c * exp(c * t) / (1.0 - std::exp(c));
  }
  double deriv2(double t) const {
    if (c > 0.0) return -c * c * std::exp(c * (t - 1.0)) / (1.0 - std::exp(-c));
    return c * c * std::exp(c * t) / (1.0 - std::exp(c));
  }
  // Antiderivative with integral(0) = 0.
  double integral(double t) const {
    if (c > 0.0) {
      const double em = std::exp(-c);
      return 0.5 * t * t - ((std::exp(c * (t - 1.0)) - em) / c - t * em) / (1.0 - em);
    }
    return 0.5 * t * t + ((std::exp(c * t) - 1.0) / c - t) / (1.0 - std::exp(c));
  }
};

struct ConvDiffExact {
  LayerFactor gx, gy;
  double pe = 1.0;
  Eigen::Vector2d b{1.0, 1.0};

  template <class T>
  T u(T x, T y) const {
    return gx.value(x) * gy.value(y);
  }
  template <class T>
  T ux(T x, T y) const {
    return gx.deriv(x) * gy.value(y);
  }
  template <class T>
  T uy(T x, T y) const {
    return gx.value(x) * gy.deriv(y);
  }
  double f(double x, double y) const {
    const double lap = gx.deriv2(x) * gy.value(y) + gx.value(x) * gy.deriv2(y);
    return -lap / pe + b.x() * ux(x, y) + b.y() * uy(x, y);
  }
};

// Named verification problem: coefficients, manufactured source, exact
// solution handles, and exact QoI values.
struct Benchmark {
  std::string name;
  ProblemDef problem;
  double pe = 0.0;
  bool is_laplace = false;
  LaplaceBumpExact laplace;
  ConvDiffExact convdiff;

  double exact_u(const Eigen::Vector2d& x) const;
  Eigen::Vector2d exact_grad(const Eigen::Vector2d& x) const;
  Eigen::Vector2d exact_q(const Eigen::Vector2d& x) const; // D grad u

  double exact_qoi(const QoIDef& qoi) const;
  std::string qoi_provenance(const QoIDef& qoi) const;
};

Benchmark laplace_bump();
Benchmark convdiff_layers(double pe, const Eigen::Vector2d& b);

// The default QoIs of the verification suite.
QoIDef qoi_avg_u_quadrant();
QoIDef qoi_avg_dudx_quadrant();
QoIDef qoi_avg_qx_quadrant();
QoIDef qoi_line_avg_qx_left();

// Adaptive panel quadrature used to cross-check closed-form QoI values and to
// evaluate non-factorizable ones (tolerance ~1e-12).
double adaptive_integrate_2d(const std::function<double(double, double)>& f, double x0, double x1,
                             double y0, double y1, double tol = 1e-12);
double adaptive_integrate_1d(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-13);

} // namespace avsfe
