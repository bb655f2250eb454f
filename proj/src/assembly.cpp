#include "avsfe/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "avsfe/map.hpp"
#include "avsfe/parallel.hpp"
#include "avsfe/quadrature.hpp"

namespace avsfe {

namespace {

// Reference basis tables at the volume rule and at the per-side edge rule,
// cached by (cell type, degree, quadrature order).
struct DegTables {
  QuadratureRule vol;
  EdgeRule edge;
  BasisSet vol_tab;
  std::array<BasisSet, 4> edge_tab;
};

std::shared_ptr<const DegTables> basis_tables(CellType type, int degree, int order) {
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const DegTables>> cache;
  static std::mutex mtx;
  const auto key = std::make_tuple(static_cast<int>(type), degree, order);
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto tab = std::make_shared<DegTables>();
  tab->vol = quadrature(type, order);
  tab->edge = edge_quadrature(order);
  tab->vol_tab = lagrange_basis(type, degree, tab->vol.points);
  const int nsides = type == CellType::Quad ? 4 : 3;
  for (int s = 0; s < nsides; ++s) {
    std::vector<Eigen::Vector2d> pts;
    for (double t : tab->edge.points) pts.push_back(side_ref_point(type, s, t));
    tab->edge_tab[s] = lagrange_basis(type, degree, pts);
  }
  cache.emplace(key, tab);
  return tab;
}

// Physical-gradient tables: gx/gy are (nfuncs x npts).
void physical_gradients(const BasisSet& tab, const std::vector<Eigen::Matrix2d>& jinv_t,
                        Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) {
  const int n = static_cast<int>(tab.val.rows());
  const int nq = static_cast<int>(tab.val.cols());
  gx.resize(n, nq);
  gy.resize(n, nq);
  for (int q = 0; q < nq; ++q) {
    gx.col(q) = jinv_t[q](0, 0) * tab.dx.col(q) + jinv_t[q](0, 1) * tab.dy.col(q);
    gy.col(q) = jinv_t[q](1, 0) * tab.dx.col(q) + jinv_t[q](1, 1) * tab.dy.col(q);
  }
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

} // namespace

int volume_quadrature_order(int p_trial, int p_test) {
  return 2 * std::max(p_trial, p_test) + 6;
}

ElementSystem element_system(const ProblemDef& problem, const TrialSpace& space, int m,
                             int p_test, const LoadSpec& load) {
  const Mesh& mesh = *space.mesh;
  const CellType type = mesh.cell_type;
  const int p = space.degree;
  const bool dual = problem.direction == Direction::Dual;
  const int order = volume_quadrature_order(p, p_test);

  ElementSystem sys;
  sys.layout = make_test_layout(mesh, m, p_test, dual);
  const TestLayout& lay = sys.layout;

  const auto trial_tab = basis_tables(type, p, order);
  const auto test_tab = basis_tables(type, p_test, order);
  const QuadratureRule& vol = trial_tab->vol;
  const int nq = vol.size();

  const ElementMap map = element_map(mesh, m);
  const ElementGeometry geo = element_geometry(mesh, m);
  const double h2 = 0.5 * geo.diameter * geo.diameter; // EXPERIMENT

  std::vector<Eigen::Vector2d> phys(nq);
  std::vector<Eigen::Matrix2d> jinv_t(nq);
  Eigen::VectorXd wq(nq);
  for (int q = 0; q < nq; ++q) {
    phys[q] = map.to_phys(vol.points[q]);
    const Eigen::Matrix2d J = map.jacobian(vol.points[q]);
    jinv_t[q] = J.inverse().transpose();
    wq[q] = vol.weights[q] * J.determinant();
  }

  Eigen::MatrixXd tgx, tgy, sgx, sgy;
  physical_gradients(trial_tab->vol_tab, jinv_t, tgx, tgy);
  physical_gradients(test_tab->vol_tab, jinv_t, sgx, sgy);
  const Eigen::MatrixXd& tv = trial_tab->vol_tab.val;
  const Eigen::MatrixXd& sv = test_tab->vol_tab.val;

  const Eigen::MatrixXd sv_a = select_rows(sv, lay.active);
  const Eigen::MatrixXd sgx_a = select_rows(sgx, lay.active);
  const Eigen::MatrixXd sgy_a = select_rows(sgy, lay.active);

  const int n_act = lay.n_scalar();
  const int n_node = lay.n_node;
  const int nt = lay.n_total();
  const int n_tr = static_cast<int>(tv.rows());
  const int n_flux = space.local_flux_count(m);
  const int n_trial = n_tr + n_flux;

  // Gram matrix: h^2 grad v . grad v + v v on the scalar block, nodal mass on
  // each vector component block.
  sys.G = Eigen::MatrixXd::Zero(nt, nt);
  const Eigen::MatrixXd wdiag = wq.asDiagonal();
  sys.G.topLeftCorner(n_act, n_act) = h2 * (sgx_a * wdiag * sgx_a.transpose() +
                                            sgy_a * wdiag * sgy_a.transpose()) +
                                      sv_a * wdiag * sv_a.transpose();
  const Eigen::MatrixXd mass = sv * wdiag * sv.transpose();
  sys.G.block(n_act, n_act, n_node, n_node) = mass;
  sys.G.block(n_act + n_node, n_act + n_node, n_node, n_node) = mass;

  // Bilinear form. Trial rows: scalar nodes then flux dofs; test columns:
  // active scalar nodes, w_x block, w_y block.
  sys.B = Eigen::MatrixXd::Zero(n_trial, nt);
  const Eigen::Matrix2d& D = problem.D;

  Eigen::VectorXd bxw(nq), byw(nq);
  for (int q = 0; q < nq; ++q) {
    const Eigen::Vector2d bq = problem.b ? problem.b(phys[q]) : Eigen::Vector2d::Zero();
    bxw[q] = bq.x() * wq[q];
    byw[q] = bq.y() * wq[q];
  }

  // Scalar trial rows.
  {
    const Eigen::MatrixXd conv_w = tgx * bxw.asDiagonal() + tgy * byw.asDiagonal();
    const double s = dual ? -1.0 : 1.0;
    sys.B.block(0, 0, n_tr, n_act) = s * conv_w * sv_a.transpose();
    Eigen::MatrixXd fx, fy; // flux-equation pairing of the scalar trial field
    if (dual) {
      fx = tgx; // (grad p) . w
      fy = tgy;
    } else {
      fx = D(0, 0) * tgx + D(0, 1) * tgy; // (D grad u) . w
      fy = D(1, 0) * tgx + D(1, 1) * tgy;
    }
    sys.B.block(0, n_act, n_tr, n_node) = fx * wdiag * sv.transpose();
    sys.B.block(0, n_act + n_node, n_tr, n_node) = fy * wdiag * sv.transpose();
  }

  // Flux trial rows: volume terms.
  if (space.flux == FluxFamily::C0) {
    const Eigen::MatrixXd tvw = tv * wdiag;
    const Eigen::MatrixXd neg_mass_tr = -tvw * sv.transpose();
    if (!dual) {
      sys.B.block(n_tr, 0, n_tr, n_act) = tvw * sgx_a.transpose();
      sys.B.block(2 * n_tr, 0, n_tr, n_act) = tvw * sgy_a.transpose();
    } else {
      sys.B.block(n_tr, 0, n_tr, n_act) =
          tvw * (D(0, 0) * sgx_a + D(1, 0) * sgy_a).transpose();
      sys.B.block(2 * n_tr, 0, n_tr, n_act) =
          tvw * (D(0, 1) * sgx_a + D(1, 1) * sgy_a).transpose();
    }
    sys.B.block(n_tr, n_act, n_tr, n_node) = neg_mass_tr;
    sys.B.block(2 * n_tr, n_act + n_node, n_tr, n_node) = neg_mass_tr;
  } else {
    Eigen::MatrixXd vx, vy;
    space.rt[m]->eval(phys, vx, vy);
    Eigen::MatrixXd px = vx, py = vy; // (D r) for dual, r itself for primal
    if (dual) {
      px = D(0, 0) * vx + D(0, 1) * vy;
      py = D(1, 0) * vx + D(1, 1) * vy;
    }
    sys.B.block(n_tr, 0, n_flux, n_act) =
        px * wdiag * sgx_a.transpose() + py * wdiag * sgy_a.transpose();
    sys.B.block(n_tr, n_act, n_flux, n_node) = -vx * wdiag * sv.transpose();
    sys.B.block(n_tr, n_act + n_node, n_flux, n_node) = -vy * wdiag * sv.transpose();
  }

  // Interior-edge trace term: -gamma_n(q) v for the primal form, -gamma_n(D r) v
  // for the dual form. Boundary sides are excluded (they lie in the closure of
  // Gamma_D and Gamma_N).
  const int nsides = mesh.verts_per_elem();
  const EdgeRule& er = trial_tab->edge;
  for (int s = 0; s < nsides; ++s) {
    if (mesh.edges[mesh.elem_edges[m][s]].boundary()) continue;
    const double len = geo.edge_lengths[s];
    const Eigen::Vector2d n = geo.edge_normals[s];
    const Eigen::MatrixXd& tve = trial_tab->edge_tab[s].val;
    const Eigen::MatrixXd sve_a = select_rows(test_tab->edge_tab[s].val, lay.active);
    Eigen::VectorXd we(er.size());
    for (int k = 0; k < er.size(); ++k) we[k] = er.weights[k] * len;

    if (space.flux == FluxFamily::C0) {
      // Normal-trace coefficients of the (qx, qy) rows.
      const double cx = dual ? D(0, 0) * n.x() + D(1, 0) * n.y() : n.x();
      const double cy = dual ? D(0, 1) * n.x() + D(1, 1) * n.y() : n.y();
      const Eigen::MatrixXd trace = tve * we.asDiagonal() * sve_a.transpose();
      sys.B.block(n_tr, 0, n_tr, n_act) -= cx * trace;
      sys.B.block(2 * n_tr, 0, n_tr, n_act) -= cy * trace;
    } else {
      std::vector<Eigen::Vector2d> pe(er.size());
      for (int k = 0; k < er.size(); ++k)
        pe[k] = mesh.vertex_of(m, s) +
                er.points[k] * (mesh.vertex_of(m, (s + 1) % nsides) - mesh.vertex_of(m, s));
      Eigen::MatrixXd vxe, vye;
      space.rt[m]->eval(pe, vxe, vye);
      Eigen::MatrixXd qn;
      if (!dual) {
        qn = n.x() * vxe + n.y() * vye;
      } else {
        qn = (D(0, 0) * n.x() + D(1, 0) * n.y()) * vxe + (D(0, 1) * n.x() + D(1, 1) * n.y()) * vye;
      }
      sys.B.block(n_tr, 0, n_flux, n_act) -= qn * we.asDiagonal() * sve_a.transpose();
    }
  }

  // Load functional against the test basis.
  sys.f = Eigen::VectorXd::Zero(nt);
  if (load.kind == LoadSpec::Kind::Source) {
    if (problem.f) {
      Eigen::VectorXd fw(nq);
      for (int q = 0; q < nq; ++q) fw[q] = problem.f(phys[q]) * wq[q];
      sys.f.head(n_act) = sv_a * fw;
    }
    if (problem.has_neumann()) {
      for (int s = 0; s < nsides; ++s) {
        const Mesh::Edge& e = mesh.edges[mesh.elem_edges[m][s]];
        if (!e.boundary() || e.tag != static_cast<int>(BoundaryTag::Neumann)) continue;
        const Eigen::MatrixXd sve_a = select_rows(test_tab->edge_tab[s].val, lay.active);
        for (int k = 0; k < er.size(); ++k) {
          const Eigen::Vector2d x =
              mesh.vertex_of(m, s) +
              er.points[k] * (mesh.vertex_of(m, (s + 1) % nsides) - mesh.vertex_of(m, s));
          sys.f.head(n_act) +=
              er.weights[k] * geo.edge_lengths[s] * problem.g(x) * sve_a.col(k);
        }
      }
    }
  } else if (load.kind == LoadSpec::Kind::QoI) {
    const QoIDef& qoi = *load.qoi;
    const QoIQuad pts = qoi_element_quadrature(mesh, m, qoi, order);
    if (pts.size() > 0) {
      const double factor = qoi.scale / qoi.measure();
      const BasisSet bs = lagrange_basis(type, p_test, pts.ref);
      switch (qoi.kind) {
        case QoIKind::AvgU:
          for (int q = 0; q < pts.size(); ++q)
            for (int a = 0; a < n_act; ++a)
              sys.f[a] += factor * pts.w[q] * bs.val(lay.active[a], q);
          break;
        case QoIKind::AvgDuDx:
          for (int q = 0; q < pts.size(); ++q) {
            const Eigen::Matrix2d jt = map.jacobian(pts.ref[q]).inverse().transpose();
            for (int a = 0; a < n_act; ++a) {
              const int k = lay.active[a];
              sys.f[a] += factor * pts.w[q] * (jt(0, 0) * bs.dx(k, q) + jt(0, 1) * bs.dy(k, q));
            }
          }
          break;
        case QoIKind::AvgQx:
        case QoIKind::LineAvgQx:
          for (int q = 0; q < pts.size(); ++q)
            for (int k = 0; k < n_node; ++k)
              sys.f[n_act + k] += factor * pts.w[q] * bs.val(k, q);
          break;
      }
    }
  }
  return sys;
}

Eigen::MatrixXd local_gram(const Mesh& mesh, int m, const TestLayout& layout) {
  const int order = volume_quadrature_order(layout.p_test, layout.p_test);
  const auto test_tab = basis_tables(mesh.cell_type, layout.p_test, order);
  const QuadratureRule& vol = test_tab->vol;
  const ElementMap map = element_map(mesh, m);
  const ElementGeometry geo = element_geometry(mesh, m);
  const double h2 = 0.5 * geo.diameter * geo.diameter; // EXPERIMENT

  const int nq = vol.size();
  std::vector<Eigen::Matrix2d> jinv_t(nq);
  Eigen::VectorXd wq(nq);
  for (int q = 0; q < nq; ++q) {
    const Eigen::Matrix2d J = map.jacobian(vol.points[q]);
    jinv_t[q] = J.inverse().transpose();
    wq[q] = vol.weights[q] * J.determinant();
  }
  Eigen::MatrixXd sgx, sgy;
  physical_gradients(test_tab->vol_tab, jinv_t, sgx, sgy);
  const Eigen::MatrixXd& sv = test_tab->vol_tab.val;
  const Eigen::MatrixXd sv_a = select_rows(sv, layout.active);
  const Eigen::MatrixXd sgx_a = select_rows(sgx, layout.active);
  const Eigen::MatrixXd sgy_a = select_rows(sgy, layout.active);

  const int n_act = layout.n_scalar();
  const int n_node = layout.n_node;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(layout.n_total(), layout.n_total());
  const Eigen::MatrixXd wdiag = wq.asDiagonal();
  G.topLeftCorner(n_act, n_act) =
      h2 * (sgx_a * wdiag * sgx_a.transpose() + sgy_a * wdiag * sgy_a.transpose()) +
      sv_a * wdiag * sv_a.transpose();
  const Eigen::MatrixXd mass = sv * wdiag * sv.transpose();
  G.block(n_act, n_act, n_node, n_node) = mass;
  G.block(n_act + n_node, n_act + n_node, n_node, n_node) = mass;
  return G;
}

Eigen::MatrixXd local_bilinear(const ProblemDef& problem, const TrialSpace& space, int m,
                               const TestLayout& layout) {
  ElementSystem sys = element_system(problem, space, m, layout.p_test, LoadSpec::none());
  return sys.B;
}

Eigen::MatrixXd optimal_test(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("optimal_test: Gram matrix not SPD (min diagonal " +
                             std::to_string(G.diagonal().minCoeff()) + ")");
  }
  return llt.solve(B.transpose());
}

SparseSystem assemble(const ProblemDef& problem, const TrialSpace& space, int p_test,
                      const LoadSpec& load) {
  problem.validate();
  const Mesh& mesh = *space.mesh;
  const int n = space.total_dofs();
  const bool dual = problem.direction == Direction::Dual;

  SparseSystem out;
  out.F = Eigen::VectorXd::Zero(n);
  out.constrained.assign(n, 0);
  const auto& flags = dual ? space.scalar_on_boundary : space.scalar_on_dirichlet;
  for (int i = 0; i < space.n_scalar; ++i) out.constrained[i] = flags[i];

  std::vector<Eigen::Triplet<double>> trips;
  {
    // Crude upper bound on scattered entries.
    size_t cap = 0;
    for (int m = 0; m < mesh.num_elems(); ++m) {
      const size_t nl = space.local_total(m);
      cap += nl * nl;
    }
    trips.reserve(cap + n);
  }

  const int chunk = 256;
  std::vector<Eigen::MatrixXd> kloc(chunk);
  std::vector<Eigen::VectorXd> floc(chunk);
  for (int start = 0; start < mesh.num_elems(); start += chunk) {
    const int count = std::min(chunk, mesh.num_elems() - start);
    std::exception_ptr err;
    std::mutex err_mtx;
    parallel_for(count, [&](int i) {
      try {
        const int m = start + i;
        ElementSystem sys = element_system(problem, space, m, p_test, load);
        Eigen::MatrixXd T = optimal_test(sys.G, sys.B);
        kloc[i] = sys.B * T;
        floc[i] = T.transpose() * sys.f;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mtx);
        if (!err) err = std::current_exception();
      }
    });
    if (err) std::rethrow_exception(err);
    for (int i = 0; i < count; ++i) {
      const std::vector<int> gids = space.element_dofs(start + i);
      const Eigen::MatrixXd& K = kloc[i];
      for (size_t r = 0; r < gids.size(); ++r) {
        const int gi = gids[r];
        if (out.constrained[gi]) continue;
        out.F[gi] += floc[i][r];
        for (size_t c = 0; c < gids.size(); ++c) {
          if (out.constrained[gids[c]]) continue;
          trips.emplace_back(gi, gids[c], K(r, c));
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (out.constrained[i]) trips.emplace_back(i, i, 1.0);

  out.K.resize(n, n);
  out.K.setFromTriplets(trips.begin(), trips.end());
  out.K.makeCompressed();
  return out;
}

Eigen::VectorXd solve_spd(const SparseSystem& system) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(system.K);
  Eigen::VectorXd x;
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    x = ldlt.solve(system.F);
    ok = ldlt.info() == Eigen::Success;
  }
  if (!ok) {
    // Diagonally preconditioned CG fallback.
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(20000);
    cg.compute(system.K);
    x = cg.solve(system.F);
    if (cg.info() != Eigen::Success)
      throw std::runtime_error("solve_spd: factorization and CG both failed (dim " +
                               std::to_string(system.dim()) + ", nnz " +
                               std::to_string(system.K.nonZeros()) + ")");
  }
  const double fnorm = system.F.norm();
  if (fnorm > 0.0) {
    const double rel = (system.K * x - system.F).norm() / fnorm;
    if (rel > 1e-8)
      throw std::runtime_error("solve_spd: residual too large: " + std::to_string(rel));
  }
  return x;
}

Eigen::VectorXd local_residual(const ProblemDef& problem, const TrialSpace& space, int m,
                               int p_test, const Eigen::VectorXd& sol) {
  ElementSystem sys = element_system(problem, space, m, p_test, LoadSpec::source());
  const std::vector<int> gids = space.element_dofs(m);
  Eigen::VectorXd uloc(gids.size());
  for (size_t k = 0; k < gids.size(); ++k) uloc[k] = sol[gids[k]];
  return sys.f - sys.B.transpose() * uloc;
}

double energy_residual_norm(const ProblemDef& problem, const TrialSpace& space,
                            const Eigen::VectorXd& sol, int p_test) {
  const Mesh& mesh = *space.mesh;
  std::vector<double> parts(mesh.num_elems());
  parallel_for(mesh.num_elems(), [&](int m) {
    ElementSystem sys = element_system(problem, space, m, p_test, LoadSpec::source());
    const std::vector<int> gids = space.element_dofs(m);
    Eigen::VectorXd uloc(gids.size());
    for (size_t k = 0; k < gids.size(); ++k) uloc[k] = sol[gids[k]];
    const Eigen::VectorXd r = sys.f - sys.B.transpose() * uloc;
    parts[m] = r.dot(sys.G.llt().solve(r));
  });
  double total = 0.0;
  for (double v : parts) total += v;
  return std::sqrt(std::max(0.0, total));
}

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& K) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_matrix_market: cannot open " + path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << K.rows() << " " << K.cols() << " " << K.nonZeros() << "\n";
  os.precision(16);
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

} // namespace avsfe
