#include "avsfe/spaces.hpp"

#include <stdexcept>

namespace avsfe {

namespace {

// Maps a local side node index to the global edge node index. Edge-interior
// nodes are numbered along the global edge direction v0 -> v1 (v0 < v1).
int edge_node_index(const Mesh& mesh, int m, int side, int side_index, int p) {
  const Mesh::Edge& e = mesh.edges[mesh.elem_edges[m][side]];
  const int local_start = mesh.elems[m][side];
  const bool along = (local_start == e.v0);
  return along ? side_index : (p - 2 - side_index);
}

} // namespace

std::vector<int> TrialSpace::element_dofs(int m) const {
  std::vector<int> dofs;
  dofs.reserve(local_total(m));
  for (int k : elem_scalar[m]) dofs.push_back(k);
  if (flux == FluxFamily::C0) {
    for (int k : elem_scalar[m]) dofs.push_back(n_scalar + k);
    for (int k : elem_scalar[m]) dofs.push_back(2 * n_scalar + k);
  } else {
    for (int k : elem_flux[m]) dofs.push_back(n_scalar + k);
  }
  return dofs;
}

TrialSpace make_trial_space(const Mesh& mesh, FluxFamily flux, int degree) {
  if (degree < 1 || degree > 4)
    throw std::invalid_argument("make_trial_space: degree must be in [1,4]");
  if (flux == FluxFamily::RT && mesh.cell_type != CellType::Tri)
    throw std::invalid_argument("make_trial_space: RT flux requires triangles");

  TrialSpace sp;
  sp.mesh = &mesh;
  sp.flux = flux;
  sp.degree = degree;

  const int p = degree;
  const int n_edge_nodes = p - 1;
  const int n_int =
      mesh.cell_type == CellType::Quad ? (p - 1) * (p - 1) : (p - 1) * (p - 2) / 2;
  const int nv = mesh.num_vertices();
  const int ne = static_cast<int>(mesh.edges.size());
  sp.n_scalar = nv + ne * n_edge_nodes + mesh.num_elems() * n_int;

  const auto cls = classify_nodes(mesh.cell_type, p);
  sp.elem_scalar.resize(mesh.num_elems());
  for (int m = 0; m < mesh.num_elems(); ++m) {
    auto& map = sp.elem_scalar[m];
    map.resize(cls.size());
    for (size_t k = 0; k < cls.size(); ++k) {
      switch (cls[k].kind) {
        case NodeClass::Vertex:
          map[k] = mesh.elems[m][cls[k].entity];
          break;
        case NodeClass::Side: {
          const int edge = mesh.elem_edges[m][cls[k].entity];
          map[k] = nv + edge * n_edge_nodes +
                   edge_node_index(mesh, m, cls[k].entity, cls[k].side_index, p);
          break;
        }
        case NodeClass::Interior:
          map[k] = nv + ne * n_edge_nodes + m * n_int + cls[k].entity;
          break;
      }
    }
  }

  if (flux == FluxFamily::C0) {
    sp.n_flux = 2 * sp.n_scalar;
  } else {
    // One RT dof block per edge (p moments) plus per-element interior block.
    sp.n_flux = ne * p + mesh.num_elems() * p * (p - 1);
    sp.elem_flux.resize(mesh.num_elems());
    sp.rt.resize(mesh.num_elems());
    for (int m = 0; m < mesh.num_elems(); ++m) {
      std::array<Eigen::Vector2d, 3> verts = {mesh.vertex_of(m, 0), mesh.vertex_of(m, 1),
                                              mesh.vertex_of(m, 2)};
      std::array<RTEdgeFrame, 3> frames;
      auto& map = sp.elem_flux[m];
      for (int s = 0; s < 3; ++s) {
        const Mesh::Edge& e = mesh.edges[mesh.elem_edges[m][s]];
        const Eigen::Vector2d a = mesh.vertices[e.v0];
        const Eigen::Vector2d b = mesh.vertices[e.v1];
        const Eigen::Vector2d t = (b - a).normalized();
        frames[s] = {a, b, Eigen::Vector2d(t.y(), -t.x())};
        for (int k = 0; k < p; ++k) map.push_back(mesh.elem_edges[m][s] * p + k);
      }
      for (int k = 0; k < p * (p - 1); ++k) map.push_back(ne * p + m * p * (p - 1) + k);
      sp.rt[m] = std::make_shared<RTSpace>(verts, frames, p);
    }
  }

  // Boundary closure flags for the scalar field.
  sp.scalar_on_dirichlet.assign(sp.n_scalar, 0);
  sp.scalar_on_boundary.assign(sp.n_scalar, 0);
  for (int e = 0; e < ne; ++e) {
    const Mesh::Edge& ed = mesh.edges[e];
    if (!ed.boundary()) continue;
    const bool dir = ed.tag == static_cast<int>(BoundaryTag::Dirichlet);
    auto set = [&](int dof) {
      sp.scalar_on_boundary[dof] = 1;
      if (dir) sp.scalar_on_dirichlet[dof] = 1;
    };
    set(ed.v0);
    set(ed.v1);
    for (int k = 0; k < n_edge_nodes; ++k) set(nv + e * n_edge_nodes + k);
  }
  return sp;
}

TestLayout make_test_layout(const Mesh& mesh, int m, int p_test, bool constrain_all_boundary) {
  TestLayout layout;
  layout.p_test = p_test;
  layout.n_node = lagrange_dim(mesh.cell_type, p_test);
  const auto cls = classify_nodes(mesh.cell_type, p_test);
  const int nv = mesh.verts_per_elem();

  std::array<bool, 4> side_constrained{false, false, false, false};
  bool any = false;
  for (int s = 0; s < nv; ++s) {
    const Mesh::Edge& e = mesh.edges[mesh.elem_edges[m][s]];
    if (!e.boundary()) continue;
    if (constrain_all_boundary || e.tag == static_cast<int>(BoundaryTag::Dirichlet)) {
      side_constrained[s] = true;
      any = true;
    }
  }

  layout.active.reserve(layout.n_node);
  for (int k = 0; k < layout.n_node; ++k) {
    bool drop = false;
    if (any) {
      const NodeClass& c = cls[k];
      if (c.kind == NodeClass::Side) {
        drop = side_constrained[c.entity];
      } else if (c.kind == NodeClass::Vertex) {
        // Closure: a vertex node is constrained when either adjacent side is.
        const int prev = (c.entity + nv - 1) % nv;
        drop = side_constrained[c.entity] || side_constrained[prev];
      }
    }
    if (!drop) layout.active.push_back(k);
  }
  return layout;
}

} // namespace avsfe
