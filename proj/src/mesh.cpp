#include "hrks/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hrks {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

}  // namespace

double Mesh::area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double Mesh::diameter(int t) const {
  const auto& tri = triangles[t];
  double d = 0.0;
  for (int k = 0; k < 3; ++k)
    d = std::max(d, (vertices[tri[k]] - vertices[tri[(k + 1) % 3]]).norm());
  return d;
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (int t = 0; t < nt(); ++t) h = std::max(h, diameter(t));
  return h;
}

std::array<Vec2, 3> Mesh::barycentric_gradients(int t) const {
  const auto& tri = triangles[t];
  const double a2 = 2.0 * area(t);
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = vertices[tri[(k + 2) % 3]] - vertices[tri[(k + 1) % 3]];
    g[k] = Vec2(-d.y(), d.x()) / a2;
  }
  return g;
}

std::array<double, 3> Mesh::barycentric(int t, const Vec2& p) const {
  const auto& tri = triangles[t];
  const double a = area(t);
  return {signed_area(p, vertices[tri[1]], vertices[tri[2]]) / a,
          signed_area(vertices[tri[0]], p, vertices[tri[2]]) / a,
          signed_area(vertices[tri[0]], vertices[tri[1]], p) / a};
}

int Mesh::locate(const Vec2& p, double tol) const {
  for (int t = 0; t < nt(); ++t) {
    const auto l = barycentric(t, p);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
  }
  return -1;
}

Mesh finalize_mesh(std::vector<Vec2> vertices,
                   std::vector<std::array<int, 3>> triangles) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);

  const int nv = m.nv();
  for (auto& tri : m.triangles) {
    for (int v : tri)
      if (v < 0 || v >= nv) throw MeshError("vertex index out of range");
    double a = signed_area(m.vertices[tri[0]], m.vertices[tri[1]],
                           m.vertices[tri[2]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    double d = 0.0;
    for (int k = 0; k < 3; ++k)
      d = std::max(d, (m.vertices[tri[k]] - m.vertices[tri[(k + 1) % 3]]).norm());
    if (!(a > 1e-12 * d * d)) throw MeshError("nonpositive triangle area");
  }

  std::map<std::array<int, 2>, int> edge_id;
  m.tri_edges.assign(m.nt(), {-1, -1, -1});
  for (int t = 0; t < m.nt(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      const std::array<int, 2> key{a, b};
      auto it = edge_id.find(key);
      int e;
      if (it == edge_id.end()) {
        e = static_cast<int>(m.edges.size());
        edge_id.emplace(key, e);
        m.edges.push_back(key);
        m.edge_tris.push_back({t, -1});
      } else {
        e = it->second;
        if (m.edge_tris[e][1] != -1)
          throw MeshError("edge shared by more than two triangles");
        m.edge_tris[e][1] = t;
      }
      m.tri_edges[t][k] = e;
    }
  }

  m.edge_boundary.assign(m.ne(), 0);
  m.vertex_boundary.assign(nv, 0);
  for (int e = 0; e < m.ne(); ++e) {
    if (m.edge_tris[e][1] == -1) {
      m.edge_boundary[e] = 1;
      m.vertex_boundary[m.edges[e][0]] = 1;
      m.vertex_boundary[m.edges[e][1]] = 1;
    }
  }

  m.interior_vertex_id.assign(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (!m.vertex_boundary[v]) m.interior_vertex_id[v] = m.n_interior_vertices++;
  m.interior_edge_id.assign(m.ne(), -1);
  for (int e = 0; e < m.ne(); ++e)
    if (!m.edge_boundary[e]) m.interior_edge_id[e] = m.n_interior_edges++;

  if (m.nv() - m.ne() + m.nt() != 1)
    throw MeshError("Euler relation violated; domain not simply connected");

  // Every boundary vertex must be joined by an edge to an interior vertex.
  std::vector<char> ok(nv, 0);
  for (const auto& e : m.edges) {
    if (!m.vertex_boundary[e[0]] || !m.vertex_boundary[e[1]]) {
      ok[e[0]] = 1;
      ok[e[1]] = 1;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (m.vertex_boundary[v] && !ok[v])
      throw MeshError("boundary vertex " + std::to_string(v) +
                      " is not connected to an interior vertex");

  return m;
}

Mesh generate_structured(int n, MeshPattern pattern) {
  if (n < 1) throw MeshError("subdivision count must be >= 1");
  std::vector<Vec2> vx;
  std::vector<std::array<int, 3>> tris;
  const double h = 1.0 / n;
  auto grid = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vx.emplace_back(i * h, j * h);

  if (pattern == MeshPattern::crisscross) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int c = static_cast<int>(vx.size());
        vx.emplace_back((i + 0.5) * h, (j + 0.5) * h);
        const int bl = grid(i, j), br = grid(i + 1, j);
        const int tl = grid(i, j + 1), tr = grid(i + 1, j + 1);
        tris.push_back({bl, br, c});
        tris.push_back({br, tr, c});
        tris.push_back({tr, tl, c});
        tris.push_back({tl, bl, c});
      }
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int bl = grid(i, j), br = grid(i + 1, j);
        const int tl = grid(i, j + 1), tr = grid(i + 1, j + 1);
        if ((i + j) % 2 == 0) {
          tris.push_back({bl, br, tr});
          tris.push_back({bl, tr, tl});
        } else {
          tris.push_back({bl, br, tl});
          tris.push_back({br, tr, tl});
        }
      }
  }
  return finalize_mesh(std::move(vx), std::move(tris));
}

EntityTables classify_entities(const Mesh& mesh) {
  EntityTables t;
  for (int v = 0; v < mesh.nv(); ++v)
    (mesh.vertex_boundary[v] ? t.boundary_vertices : t.interior_vertices)
        .push_back(v);
  for (int e = 0; e < mesh.ne(); ++e)
    (mesh.edge_boundary[e] ? t.boundary_edges : t.interior_edges).push_back(e);
  return t;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> vx = mesh.vertices;
  std::vector<int> midpoint(mesh.ne());
  for (int e = 0; e < mesh.ne(); ++e) {
    midpoint[e] = static_cast<int>(vx.size());
    vx.push_back(0.5 * (mesh.vertices[mesh.edges[e][0]] +
                        mesh.vertices[mesh.edges[e][1]]));
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.nt());
  for (int t = 0; t < mesh.nt(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int m0 = midpoint[mesh.tri_edges[t][0]];  // opposite vertex 0
    const int m1 = midpoint[mesh.tri_edges[t][1]];
    const int m2 = midpoint[mesh.tri_edges[t][2]];
    tris.push_back({tri[0], m2, m1});
    tris.push_back({tri[1], m0, m2});
    tris.push_back({tri[2], m1, m0});
    tris.push_back({m0, m1, m2});
  }
  return finalize_mesh(std::move(vx), std::move(tris));
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line))
      throw MeshError(path + ":" + std::to_string(lineno + 1) +
                      ": unexpected end of file");
    ++lineno;
    return line;
  };

  int nv = 0, nt = 0;
  {
    std::istringstream ss(next_line());
    if (!(ss >> nv >> nt) || nv < 3 || nt < 1)
      throw MeshError(path + ":1: malformed header, expected \"nv nt\"");
  }
  std::vector<Vec2> vx(nv);
  for (int v = 0; v < nv; ++v) {
    std::istringstream ss(next_line());
    double x, y;
    if (!(ss >> x >> y))
      throw MeshError(path + ":" + std::to_string(lineno) +
                      ": malformed vertex line");
    vx[v] = Vec2(x, y);
  }
  std::vector<std::array<int, 3>> tris(nt);
  for (int t = 0; t < nt; ++t) {
    std::istringstream ss(next_line());
    std::array<int, 3> tri{};
    if (!(ss >> tri[0] >> tri[1] >> tri[2]))
      throw MeshError(path + ":" + std::to_string(lineno) +
                      ": malformed triangle line");
    for (int v : tri)
      if (v < 0 || v >= nv)
        throw MeshError(path + ":" + std::to_string(lineno) +
                        ": index out of range");
    const double a = signed_area(vx[tri[0]], vx[tri[1]], vx[tri[2]]);
    double d = 0.0;
    for (int k = 0; k < 3; ++k)
      d = std::max(d, (vx[tri[k]] - vx[tri[(k + 1) % 3]]).norm());
    if (std::abs(a) <= 1e-12 * d * d)
      throw MeshError(path + ":" + std::to_string(lineno) +
                      ": nonpositive triangle area");
    tris[t] = tri;
  }
  return finalize_mesh(std::move(vx), std::move(tris));
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file: " + path);
  char buf[128];
  out << mesh.nv() << ' ' << mesh.nt() << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw MeshError("write failed: " + path);
}

}  // namespace hrks
