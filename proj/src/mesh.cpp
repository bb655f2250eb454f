#include "avsfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace avsfe {

namespace {

using VertPair = std::pair<int, int>;

VertPair ordered(int a, int b) { return a < b ? VertPair{a, b} : VertPair{b, a}; }

struct PairHash {
  size_t operator()(const VertPair& p) const {
    return std::hash<int64_t>()((static_cast<int64_t>(p.first) << 32) ^ p.second);
  }
};

using TagMap = std::unordered_map<VertPair, int, PairHash>;

double signed_area(const std::vector<Eigen::Vector2d>& v, const std::array<int, 4>& e, int nv) {
  double a = 0.0;
  for (int k = 0; k < nv; ++k) {
    const Eigen::Vector2d& p = v[e[k]];
    const Eigen::Vector2d& q = v[e[(k + 1) % nv]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

// Collects boundary tags of a mesh into a pair-keyed map.
TagMap boundary_tags(const Mesh& mesh) {
  TagMap tags;
  for (const auto& e : mesh.edges)
    if (e.boundary()) tags[ordered(e.v0, e.v1)] = e.tag;
  return tags;
}

// When edge (a,b) is split at m, tagged halves inherit the parent tag.
void split_tag(TagMap& tags, int a, int b, int m) {
  auto it = tags.find(ordered(a, b));
  if (it == tags.end()) return;
  const int t = it->second;
  tags[ordered(a, m)] = t;
  tags[ordered(m, b)] = t;
}

void apply_tags(Mesh& mesh, const TagMap& tags) {
  for (auto& e : mesh.edges) {
    if (!e.boundary()) continue;
    auto it = tags.find(ordered(e.v0, e.v1));
    if (it == tags.end())
      throw std::runtime_error("mesh: could not inherit boundary tag");
    e.tag = it->second;
  }
}

} // namespace

double Mesh::element_area(int m) const {
  return signed_area(vertices, elems[m], verts_per_elem());
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int m = 0; m < num_elems(); ++m) a += element_area(m);
  return a;
}

void Mesh::finalize() {
  const int nv = verts_per_elem();
  edges.clear();
  elem_edges.assign(elems.size(), {-1, -1, -1, -1});
  std::unordered_map<VertPair, int, PairHash> index;
  for (int m = 0; m < num_elems(); ++m) {
    if (signed_area(vertices, elems[m], nv) <= 0.0)
      throw std::runtime_error("mesh: element " + std::to_string(m) +
                               " is degenerate or clockwise");
    for (int k = 0; k < nv; ++k) {
      const int a = elems[m][k];
      const int b = elems[m][(k + 1) % nv];
      const VertPair key = ordered(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, static_cast<int>(edges.size()));
        elem_edges[m][k] = static_cast<int>(edges.size());
        edges.push_back({key.first, key.second, m, -1, static_cast<int>(BoundaryTag::Dirichlet)});
      } else {
        Edge& e = edges[it->second];
        if (e.e1 != -1)
          throw std::runtime_error("mesh: edge with more than two incident elements");
        e.e1 = m;
        e.tag = -1;
        elem_edges[m][k] = it->second;
      }
    }
  }
}

Mesh build_structured(CellType type, int n, const Rect& domain) {
  if (n < 1) throw std::invalid_argument("build_structured: n must be >= 1");
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw std::invalid_argument("build_structured: inverted domain rectangle");
  Mesh mesh;
  mesh.cell_type = type;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(domain.lo.x() + domain.width() * i / n,
                                 domain.lo.y() + domain.height() * j / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (type == CellType::Quad) {
        mesh.elems.push_back({a, b, c, d});
      } else {
        // Diagonal a-c; peaks sit opposite the hypotenuse so newest-vertex
        // bisection starts as longest-edge bisection.
        mesh.elems.push_back({a, b, c, -1});
        mesh.peak.push_back(1);
        mesh.elems.push_back({a, c, d, -1});
        mesh.peak.push_back(2);
      }
    }
  }
  mesh.parent.assign(mesh.elems.size(), -1);
  mesh.finalize();
  return mesh;
}

Mesh build_skewed(int n, const SkewParams& params) {
  if (n < 2) throw std::invalid_argument("build_skewed: n must be >= 2");
  Mesh mesh = build_structured(CellType::Quad, n);
  const double a = params.amplitude;
  for (auto& v : mesh.vertices) {
    const double x = v.x(), y = v.y();
    v.x() = x + a * std::sin(M_PI * x) * std::sin(2.0 * M_PI * y);
    v.y() = y + a * std::sin(M_PI * y) * std::sin(2.0 * M_PI * x);
  }
  // Convexity scan: all corner turns must stay counter-clockwise.
  for (int m = 0; m < mesh.num_elems(); ++m) {
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector2d p0 = mesh.vertex_of(m, k);
      const Eigen::Vector2d p1 = mesh.vertex_of(m, (k + 1) % 4);
      const Eigen::Vector2d p2 = mesh.vertex_of(m, (k + 2) % 4);
      const Eigen::Vector2d u = p1 - p0, w = p2 - p1;
      if (u.x() * w.y() - u.y() * w.x() <= 0.0)
        throw std::invalid_argument("build_skewed: skew produces a non-convex cell");
    }
  }
  mesh.finalize();
  return mesh;
}

Mesh uniform_refine(const Mesh& mesh) {
  TagMap tags = boundary_tags(mesh);
  Mesh out;
  out.cell_type = mesh.cell_type;
  out.vertices = mesh.vertices;

  std::vector<int> midpoint(mesh.edges.size());
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto& ed = mesh.edges[e];
    midpoint[e] = out.num_vertices();
    out.vertices.push_back(0.5 * (mesh.vertices[ed.v0] + mesh.vertices[ed.v1]));
    split_tag(tags, ed.v0, ed.v1, midpoint[e]);
  }

  if (mesh.cell_type == CellType::Quad) {
    for (int m = 0; m < mesh.num_elems(); ++m) {
      const auto& el = mesh.elems[m];
      const int c = out.num_vertices();
      out.vertices.push_back(0.25 * (mesh.vertices[el[0]] + mesh.vertices[el[1]] +
                                     mesh.vertices[el[2]] + mesh.vertices[el[3]]));
      std::array<int, 4> mid;
      for (int k = 0; k < 4; ++k) mid[k] = midpoint[mesh.elem_edges[m][k]];
      for (int k = 0; k < 4; ++k) {
        out.elems.push_back({el[k], mid[k], c, mid[(k + 3) % 4]});
        out.parent.push_back(m);
      }
    }
  } else {
    for (int m = 0; m < mesh.num_elems(); ++m) {
      const auto& el = mesh.elems[m];
      const int m0 = midpoint[mesh.elem_edges[m][0]];
      const int m1 = midpoint[mesh.elem_edges[m][1]];
      const int m2 = midpoint[mesh.elem_edges[m][2]];
      const int p = mesh.peak[m];
      // Red refinement; corner children keep the parent's peak index, the
      // rotated middle child shifts it by one.
      out.elems.push_back({el[0], m0, m2, -1});
      out.elems.push_back({m0, el[1], m1, -1});
      out.elems.push_back({m2, m1, el[2], -1});
      out.elems.push_back({m0, m1, m2, -1});
      out.peak.insert(out.peak.end(), {p, p, p, (p + 1) % 3});
      for (int k = 0; k < 4; ++k) out.parent.push_back(m);
    }
  }
  out.finalize();
  apply_tags(out, tags);
  return out;
}

Mesh bisect_marked(const Mesh& mesh, const std::vector<int>& marked) {
  if (mesh.cell_type != CellType::Tri)
    throw std::invalid_argument("bisect_marked: local refinement requires a triangle mesh");
  if (marked.empty()) throw std::invalid_argument("bisect_marked: empty marked set");

  TagMap tags = boundary_tags(mesh);

  struct Tri {
    std::array<int, 3> v;
    int peak;
    int root;
  };
  std::vector<Eigen::Vector2d> verts = mesh.vertices;
  std::vector<Tri> tris(mesh.num_elems());
  for (int m = 0; m < mesh.num_elems(); ++m)
    tris[m] = {{mesh.elems[m][0], mesh.elems[m][1], mesh.elems[m][2]}, mesh.peak[m], m};

  TagMap midpoints; // split-edge pair -> midpoint vertex id
  std::vector<char> flag(tris.size(), 0);
  for (int m : marked) {
    if (m < 0 || m >= static_cast<int>(tris.size()))
      throw std::invalid_argument("bisect_marked: marked element out of range");
    flag[m] = 1;
  }

  const int max_sweeps = 64 + 2 * static_cast<int>(tris.size());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool any = false;
    const size_t count = tris.size();
    for (size_t t = 0; t < count; ++t) {
      if (!flag[t]) continue;
      any = true;
      flag[t] = 0;
      const Tri tri = tris[t];
      const int a = tri.v[tri.peak];
      const int b = tri.v[(tri.peak + 1) % 3];
      const int c = tri.v[(tri.peak + 2) % 3];
      const VertPair key = ordered(b, c);
      auto it = midpoints.find(key);
      int mid;
      if (it != midpoints.end()) {
        mid = it->second;
      } else {
        mid = static_cast<int>(verts.size());
        verts.push_back(0.5 * (verts[b] + verts[c]));
        midpoints.emplace(key, mid);
        split_tag(tags, b, c, mid);
      }
      tris[t] = {{a, b, mid}, 2, tri.root};
      tris.push_back({{a, mid, c}, 1, tri.root});
      flag.push_back(0);
    }
    // Closure: any triangle whose edge has been split elsewhere must refine.
    bool hanging = false;
    for (size_t t = 0; t < tris.size(); ++t) {
      if (flag[t]) continue;
      for (int k = 0; k < 3; ++k) {
        if (midpoints.count(ordered(tris[t].v[k], tris[t].v[(k + 1) % 3]))) {
          flag[t] = 1;
          hanging = true;
          break;
        }
      }
    }
    if (!any && !hanging) break;
    if (sweep == max_sweeps - 1)
      throw std::runtime_error("bisect_marked: closure cascade failed to terminate");
  }

  Mesh out;
  out.cell_type = CellType::Tri;
  out.vertices = std::move(verts);
  out.elems.reserve(tris.size());
  for (const auto& t : tris) {
    out.elems.push_back({t.v[0], t.v[1], t.v[2], -1});
    out.peak.push_back(t.peak);
    out.parent.push_back(t.root);
  }
  out.finalize();
  apply_tags(out, tags);
  return out;
}

ElementGeometry element_geometry(const Mesh& mesh, int m) {
  if (m < 0 || m >= mesh.num_elems())
    throw std::invalid_argument("element_geometry: element index out of range");
  const int nv = mesh.verts_per_elem();
  ElementGeometry g{};
  g.area = mesh.element_area(m);
  g.diameter = 0.0;
  for (int i = 0; i < nv; ++i) {
    g.corners[i] = mesh.vertex_of(m, i);
    for (int j = i + 1; j < nv; ++j)
      g.diameter = std::max(g.diameter, (mesh.vertex_of(m, i) - mesh.vertex_of(m, j)).norm());
  }
  for (int k = 0; k < nv; ++k) {
    const Eigen::Vector2d t = mesh.vertex_of(m, (k + 1) % nv) - mesh.vertex_of(m, k);
    g.edge_lengths[k] = t.norm();
    g.edge_normals[k] = Eigen::Vector2d(t.y(), -t.x()) / t.norm();
  }
  return g;
}

void tag_boundary(Mesh& mesh, const std::function<bool(const Eigen::Vector2d&)>& neumann) {
  for (auto& e : mesh.edges) {
    if (!e.boundary()) continue;
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
    e.tag = static_cast<int>(neumann(mid) ? BoundaryTag::Neumann : BoundaryTag::Dirichlet);
  }
}

void audit_mesh(const Mesh& mesh, double domain_area) {
  const int nv = mesh.verts_per_elem();
  for (int m = 0; m < mesh.num_elems(); ++m)
    if (signed_area(mesh.vertices, mesh.elems[m], nv) <= 0.0)
      throw std::runtime_error("audit: non-positive element area");

  std::unordered_map<VertPair, int, PairHash> incidence;
  for (int m = 0; m < mesh.num_elems(); ++m)
    for (int k = 0; k < nv; ++k)
      incidence[ordered(mesh.elems[m][k], mesh.elems[m][(k + 1) % nv])]++;
  for (const auto& [key, count] : incidence)
    if (count > 2) throw std::runtime_error("audit: edge shared by more than two elements");

  // Hanging-node scan: an edge whose midpoint coincides with a mesh vertex
  // carrying split half-edges is non-conforming.
  std::unordered_map<int64_t, int> vert_lookup;
  auto coord_key = [](const Eigen::Vector2d& p) {
    const auto q = [](double x) { return static_cast<int64_t>(std::llround(x * 1e9)); };
    return (q(p.x()) << 21) ^ q(p.y());
  };
  for (int v = 0; v < mesh.num_vertices(); ++v) vert_lookup[coord_key(mesh.vertices[v])] = v;
  for (const auto& [key, count] : incidence) {
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices[key.first] + mesh.vertices[key.second]);
    auto it = vert_lookup.find(coord_key(mid));
    if (it == vert_lookup.end()) continue;
    const int v = it->second;
    if (incidence.count(ordered(key.first, v)) && incidence.count(ordered(v, key.second)))
      throw std::runtime_error("audit: hanging node detected");
  }

  if (domain_area > 0.0) {
    const double total = mesh.total_area();
    if (std::abs(total - domain_area) > 1e-12 * domain_area)
      throw std::runtime_error("audit: element areas do not cover the domain");
  }
}

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data,
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_data) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_vtk: cannot open " + path);
  os << "# vtk DataFile Version 3.0\n";
  os << "avsfe mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  os.precision(15);
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << " 0\n";
  const int nv = mesh.verts_per_elem();
  os << "CELLS " << mesh.num_elems() << " " << mesh.num_elems() * (nv + 1) << "\n";
  for (const auto& e : mesh.elems) {
    os << nv;
    for (int k = 0; k < nv; ++k) os << " " << e[k];
    os << "\n";
  }
  os << "CELL_TYPES " << mesh.num_elems() << "\n";
  const int vtk_type = mesh.cell_type == CellType::Quad ? 9 : 5;
  for (int m = 0; m < mesh.num_elems(); ++m) os << vtk_type << "\n";
  if (!point_data.empty()) {
    os << "POINT_DATA " << mesh.num_vertices() << "\n";
    for (const auto& [name, data] : point_data) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : data) os << x << "\n";
    }
  }
  if (!cell_data.empty()) {
    os << "CELL_DATA " << mesh.num_elems() << "\n";
    for (const auto& [name, data] : cell_data) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : data) os << x << "\n";
    }
  }
}

std::string dump_mesh(const Mesh& mesh) {
  std::ostringstream os;
  os.precision(15);
  os << (mesh.cell_type == CellType::Quad ? "quad" : "tri") << " " << mesh.num_vertices() << " "
     << mesh.num_elems() << "\n";
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << "\n";
  const int nv = mesh.verts_per_elem();
  for (const auto& e : mesh.elems) {
    for (int k = 0; k < nv; ++k) os << e[k] << (k + 1 == nv ? "" : " ");
    os << "\n";
  }
  return os.str();
}

} // namespace avsfe
