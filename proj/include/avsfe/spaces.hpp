#pragma once

#include <memory>
#include <vector>

#include "avsfe/basis.hpp"
#include "avsfe/mesh.hpp"

namespace avsfe {

enum class FluxFamily { C0, RT };

// Global trial space for the (u, q) pair. Scalar field is always C0 Lagrange
// of the given degree. Flux is either a pair of C0 scalar fields sharing the
// scalar dof map, or a Raviart-Thomas field on triangles with p moments per
// edge. Global layout: u dofs [0, n_scalar), then flux dofs.
struct TrialSpace {
  const Mesh* mesh = nullptr;
  FluxFamily flux = FluxFamily::C0;
  int degree = 1;

  int n_scalar = 0;
  int n_flux = 0;
  std::vector<std::vector<int>> elem_scalar; // per element: local node -> scalar dof
  std::vector<std::vector<int>> elem_flux;   // RT: local dof -> flux dof (0-based within flux block)
  std::vector<std::shared_ptr<RTSpace>> rt;  // RT: per-element physical basis

  std::vector<char> scalar_on_dirichlet; // closure of Dirichlet-tagged edges
  std::vector<char> scalar_on_boundary;  // closure of all boundary edges

  int total_dofs() const { return n_scalar + n_flux; }
  int flux_offset() const { return n_scalar; }
  int local_scalar_count() const { return lagrange_dim(mesh->cell_type, degree); }
  int local_flux_count(int m) const {
    return flux == FluxFamily::C0 ? 2 * local_scalar_count() : rt[m]->dim();
  }
  int local_total(int m) const { return local_scalar_count() + local_flux_count(m); }

  // Global dof ids of element m: scalar nodes first, then flux dofs
  // (qx nodes then qy nodes for C0).
  std::vector<int> element_dofs(int m) const;
};

TrialSpace make_trial_space(const Mesh& mesh, FluxFamily flux, int degree);

// Element-local broken test space of degree p_test: a scalar block (nodal
// basis minus nodes on constrained edges) and two unconstrained vector
// component blocks. Constrained edges are Dirichlet-tagged ones for the
// primal form and all boundary edges for the dual form.
struct TestLayout {
  int p_test = 1;
  int n_node = 0;           // lagrange_dim of p_test
  std::vector<int> active;  // scalar test node local indices kept
  int n_scalar() const { return static_cast<int>(active.size()); }
  int n_total() const { return n_scalar() + 2 * n_node; }
};

TestLayout make_test_layout(const Mesh& mesh, int m, int p_test, bool constrain_all_boundary);

} // namespace avsfe
