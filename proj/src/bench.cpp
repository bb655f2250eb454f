#include "avsfe/bench.hpp"

#include <stdexcept>

#include "avsfe/quadrature.hpp"

namespace avsfe {

namespace {

double panel_gauss_2d(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, const std::vector<double>& gx,
                      const std::vector<double>& gw) {
  double sum = 0.0;
  const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x0 + x1);
  const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y0 + y1);
  for (size_t i = 0; i < gx.size(); ++i)
    for (size_t j = 0; j < gx.size(); ++j)
      sum += gw[i] * gw[j] * f(cx + hx * gx[i], cy + hy * gx[j]);
  return sum * hx * hy;
}

double adapt_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                double y1, double tol, int depth, const std::vector<double>& gx,
                const std::vector<double>& gw) {
  const double whole = panel_gauss_2d(f, x0, x1, y0, y1, gx, gw);
  const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  const double split = panel_gauss_2d(f, x0, xm, y0, ym, gx, gw) +
                       panel_gauss_2d(f, xm, x1, y0, ym, gx, gw) +
                       panel_gauss_2d(f, x0, xm, ym, y1, gx, gw) +
                       panel_gauss_2d(f, xm, x1, ym, y1, gx, gw);
  if (std::abs(split - whole) < tol || depth >= 14) return split;
  const double q = tol / 4.0;
  return adapt_2d(f, x0, xm, y0, ym, q, depth + 1, gx, gw) +
         adapt_2d(f, xm, x1, y0, ym, q, depth + 1, gx, gw) +
         adapt_2d(f, x0, xm, ym, y1, q, depth + 1, gx, gw) +
         adapt_2d(f, xm, x1, ym, y1, q, depth + 1, gx, gw);
}

double panel_gauss_1d(const std::function<double(double)>& f, double a, double b,
                      const std::vector<double>& gx, const std::vector<double>& gw) {
  double sum = 0.0;
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (size_t i = 0; i < gx.size(); ++i) sum += gw[i] * f(c + h * gx[i]);
  return sum * h;
}

double adapt_1d(const std::function<double(double)>& f, double a, double b, double tol, int depth,
                const std::vector<double>& gx, const std::vector<double>& gw) {
  const double whole = panel_gauss_1d(f, a, b, gx, gw);
  const double m = 0.5 * (a + b);
  const double split = panel_gauss_1d(f, a, m, gx, gw) + panel_gauss_1d(f, m, b, gx, gw);
  if (std::abs(split - whole) < tol || depth >= 20) return split;
  return adapt_1d(f, a, m, tol / 2.0, depth + 1, gx, gw) +
         adapt_1d(f, m, b, tol / 2.0, depth + 1, gx, gw);
}

} // namespace

double adaptive_integrate_2d(const std::function<double(double, double)>& f, double x0, double x1,
                             double y0, double y1, double tol) {
  std::vector<double> gx, gw;
  gauss_legendre(12, gx, gw);
  return adapt_2d(f, x0, x1, y0, y1, tol, 0, gx, gw);
}

double adaptive_integrate_1d(const std::function<double(double)>& f, double a, double b,
                             double tol) {
  std::vector<double> gx, gw;
  gauss_legendre(12, gx, gw);
  return adapt_1d(f, a, b, tol, 0, gx, gw);
}

double Benchmark::exact_u(const Eigen::Vector2d& x) const {
  return is_laplace ? laplace.u(x.x(), x.y()) : convdiff.u(x.x(), x.y());
}

Eigen::Vector2d Benchmark::exact_grad(const Eigen::Vector2d& x) const {
  if (is_laplace) return {laplace.ux(x.x(), x.y()), laplace.uy(x.x(), x.y())};
  return {convdiff.ux(x.x(), x.y()), convdiff.uy(x.x(), x.y())};
}

Eigen::Vector2d Benchmark::exact_q(const Eigen::Vector2d& x) const {
  return problem.D * exact_grad(x);
}

std::string Benchmark::qoi_provenance(const QoIDef& qoi) const {
  (void)qoi;
  return is_laplace ? "adaptive-quadrature" : "closed-form";
}

double Benchmark::exact_qoi(const QoIDef& qoi) const {
  qoi.validate();
  const double meas = qoi.measure();

  if (!is_laplace) {
    const LayerFactor& gx = convdiff.gx;
    const LayerFactor& gy = convdiff.gy;
    const double x0 = qoi.a.x(), x1 = qoi.b.x();
    const double y0 = qoi.a.y(), y1 = qoi.b.y();
    switch (qoi.kind) {
      case QoIKind::AvgU:
        return qoi.scale * (gx.integral(x1) - gx.integral(x0)) *
               (gy.integral(y1) - gy.integral(y0)) / meas;
      case QoIKind::AvgDuDx:
        return qoi.scale * (gx.value(x1) - gx.value(x0)) *
               (gy.integral(y1) - gy.integral(y0)) / meas;
      case QoIKind::AvgQx:
        return qoi.scale * problem.D(0, 0) * (gx.value(x1) - gx.value(x0)) *
               (gy.integral(y1) - gy.integral(y0)) / meas;
      case QoIKind::LineAvgQx: {
        if (std::abs(x1 - x0) > 1e-14)
          throw std::invalid_argument("exact_qoi: line QoI requires a vertical segment");
        // q_x = D_00 g'(x0) g(y) along the segment.
        return qoi.scale * problem.D(0, 0) * gx.deriv(x0) *
               (gy.integral(std::max(y0, y1)) - gy.integral(std::min(y0, y1))) / meas;
      }
    }
  }

  const LaplaceBumpExact& ex = laplace;
  switch (qoi.kind) {
    case QoIKind::AvgU:
      return qoi.scale *
             adaptive_integrate_2d([&](double x, double y) { return ex.u(x, y); }, qoi.a.x(),
                                   qoi.b.x(), qoi.a.y(), qoi.b.y()) /
             meas;
    case QoIKind::AvgDuDx:
      return qoi.scale *
             adaptive_integrate_2d([&](double x, double y) { return ex.ux(x, y); }, qoi.a.x(),
                                   qoi.b.x(), qoi.a.y(), qoi.b.y()) /
             meas;
    case QoIKind::AvgQx:
      // D = I for the Laplace fixture.
      return qoi.scale *
             adaptive_integrate_2d([&](double x, double y) { return ex.ux(x, y); }, qoi.a.x(),
                                   qoi.b.x(), qoi.a.y(), qoi.b.y()) /
             meas;
    case QoIKind::LineAvgQx: {
      if (std::abs(qoi.b.x() - qoi.a.x()) > 1e-14)
        throw std::invalid_argument("exact_qoi: line QoI requires a vertical segment");
      const double x0 = qoi.a.x();
      return qoi.scale *
             adaptive_integrate_1d([&](double y) { return ex.ux(x0, y); },
                                   std::min(qoi.a.y(), qoi.b.y()),
                                   std::max(qoi.a.y(), qoi.b.y())) /
             meas;
    }
  }
  throw std::logic_error("exact_qoi: unreachable");
}

Benchmark laplace_bump() {
  Benchmark bench;
  bench.name = "laplace-bump";
  bench.is_laplace = true;
  const LaplaceBumpExact ex = bench.laplace;
  bench.problem.D = Eigen::Matrix2d::Identity();
  bench.problem.b = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); };
  bench.problem.f = [ex](const Eigen::Vector2d& x) { return ex.f(x.x(), x.y()); };
  bench.problem.exact_u = [ex](const Eigen::Vector2d& x) { return ex.u(x.x(), x.y()); };
  bench.problem.exact_grad = [ex](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(ex.ux(x.x(), x.y()), ex.uy(x.x(), x.y()));
  };
  return bench;
}

Benchmark convdiff_layers(double pe, const Eigen::Vector2d& b) {
  if (pe <= 0.0) throw std::invalid_argument("convdiff_layers: Pe must be positive");
  if (b.x() == 0.0 || b.y() == 0.0)
    throw std::invalid_argument("convdiff_layers: convection components must be nonzero");
  Benchmark bench;
  bench.name = "convdiff-pe" + std::to_string(static_cast<int>(pe));
  bench.pe = pe;
  bench.convdiff.pe = pe;
  bench.convdiff.b = b;
  bench.convdiff.gx.c = pe * b.x();
  bench.convdiff.gy.c = pe * b.y();
  const ConvDiffExact ex = bench.convdiff;
  bench.problem.D = Eigen::Matrix2d::Identity() / pe;
  bench.problem.b = [b](const Eigen::Vector2d&) { return b; };
  bench.problem.f = [ex](const Eigen::Vector2d& x) { return ex.f(x.x(), x.y()); };
  bench.problem.exact_u = [ex](const Eigen::Vector2d& x) { return ex.u(x.x(), x.y()); };
  bench.problem.exact_grad = [ex](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(ex.ux(x.x(), x.y()), ex.uy(x.x(), x.y()));
  };
  return bench;
}

QoIDef qoi_avg_u_quadrant() {
  QoIDef q;
  q.kind = QoIKind::AvgU;
  q.a = {0.5, 0.5};
  q.b = {1.0, 1.0};
  return q;
}

QoIDef qoi_avg_dudx_quadrant() {
  QoIDef q = qoi_avg_u_quadrant();
  q.kind = QoIKind::AvgDuDx;
  return q;
}

QoIDef qoi_avg_qx_quadrant() {
  QoIDef q = qoi_avg_u_quadrant();
  q.kind = QoIKind::AvgQx;
  return q;
}

QoIDef qoi_line_avg_qx_left() {
  QoIDef q;
  q.kind = QoIKind::LineAvgQx;
  q.a = {0.0, 0.5};
  q.b = {0.0, 0.75};
  return q;
}

} // namespace avsfe
