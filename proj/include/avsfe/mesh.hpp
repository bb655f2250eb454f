#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "avsfe/quadrature.hpp"

namespace avsfe {

enum class BoundaryTag { Dirichlet, Neumann };

struct Rect {
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{1.0, 1.0};
  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
};

struct SkewParams {
  double amplitude = 0.05; // sinusoidal shear amplitude, fraction of the square
};

// Conforming 2D mesh of triangles or quadrilaterals. Elements are stored
// counter-clockwise; side k of an element runs from local vertex k to k+1.
// Values are immutable after construction; refinement returns a new mesh.
class Mesh {
 public:
  struct Edge {
    int v0, v1;   // vertex ids, v0 < v1
    int e0, e1;   // incident elements, e1 = -1 on the boundary
    int tag;      // -1 interior, else static_cast<int>(BoundaryTag)
    bool boundary() const { return e1 < 0; }
  };

  CellType cell_type = CellType::Quad;
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 4>> elems; // [3] = -1 for triangles
  std::vector<Edge> edges;
  std::vector<std::array<int, 4>> elem_edges; // edge id per side
  std::vector<int> peak;   // newest-vertex marker per triangle (refinement edge opposite)
  std::vector<int> parent; // element genealogy into the previous mesh, -1 for roots

  int num_elems() const { return static_cast<int>(elems.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int verts_per_elem() const { return cell_type == CellType::Quad ? 4 : 3; }

  Eigen::Vector2d vertex_of(int m, int k) const { return vertices[elems[m][k]]; }
  double element_area(int m) const;
  double total_area() const;

  // Rebuilds edge connectivity from the element list; boundary edges default
  // to Dirichlet unless a tag is supplied via keep_tags (see mesh.cpp helpers).
  void finalize();
};

struct ElementGeometry {
  double diameter;
  double area;
  std::array<Eigen::Vector2d, 4> corners;
  std::array<Eigen::Vector2d, 4> edge_normals; // outward unit, per local side
  std::array<double, 4> edge_lengths;
};

Mesh build_structured(CellType type, int n, const Rect& domain = Rect{});
Mesh build_skewed(int n, const SkewParams& params = SkewParams{});
Mesh uniform_refine(const Mesh& mesh);
Mesh bisect_marked(const Mesh& mesh, const std::vector<int>& marked);
ElementGeometry element_geometry(const Mesh& mesh, int m);

// Re-tags boundary edges: edges whose midpoint satisfies the predicate become
// Neumann, the rest Dirichlet.
void tag_boundary(Mesh& mesh, const std::function<bool(const Eigen::Vector2d&)>& neumann);

// Throws std::runtime_error when an invariant is violated (edge incidence,
// orientation, conformity, area cover).
void audit_mesh(const Mesh& mesh, double domain_area = -1.0);

// Legacy ASCII VTK (UNSTRUCTURED_GRID, cell types 5/9) with optional fields.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data = {},
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_data = {});

// Plain-text dump (vertex list + element list) for golden tests.
std::string dump_mesh(const Mesh& mesh);

} // namespace avsfe
