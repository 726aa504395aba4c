#include "hrks/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "hrks/parallel.hpp"

namespace hrks {

namespace {

Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      a(r, m.col_idx[k]) += m.values[k];
  return a;
}

int vertex_slot(const Mesh& mesh, int cell, int v) {
  const auto& tri = mesh.triangles[cell];
  for (int k = 0; k < 3; ++k)
    if (tri[k] == v) return k;
  throw SpaceError("vertex not in cell");
}

int edge_slot(const Mesh& mesh, int cell, int e) {
  for (int k = 0; k < 3; ++k)
    if (mesh.tri_edges[cell][k] == e) return 3 + k;
  throw SpaceError("edge not in cell");
}

// Pairing of the dual function of `slot` against its own test on the cell;
// equals 1 up to roundoff by construction.
double self_pairing(const StressSpace& ss, int cell, int slot) {
  return ss.pairing[cell].transpose().row(slot) * ss.duals[cell].dual.col(slot);
}

}  // namespace

Vec2 KSSpace::evaluate(const Mesh& mesh, int cell, const Vec2& p,
                       const Eigen::VectorXd& coeffs) const {
  const auto l = mesh.barycentric(cell, p);
  Vec2 v(0.0, 0.0);
  for (int k = 0; k < 3; ++k) {
    const int dv = cell_dofs[cell][k];
    if (dv >= 0) v.x() += coeffs(dv) * l[k];
    const int de = cell_dofs[cell][3 + k];
    if (de >= 0) v.y() += coeffs(de) * (1.0 - 2.0 * l[k]);
  }
  return v;
}

SymTensor KSSpace::strain(const Mesh& mesh, int cell,
                          const Eigen::VectorXd& coeffs) const {
  SymTensor e;
  for (int s = 0; s < 6; ++s) {
    const int d = cell_dofs[cell][s];
    if (d >= 0) e += coeffs(d) * local_test_strain(mesh, cell, s);
  }
  return e;
}

KSSpace build_ks_space(const Mesh& mesh) {
  KSSpace ks;
  ks.vertex_dof.assign(mesh.nv(), -1);
  ks.edge_dof.assign(mesh.ne(), -1);
  for (int v = 0; v < mesh.nv(); ++v)
    if (!mesh.vertex_boundary[v]) ks.vertex_dof[v] = ks.n_vertex_dofs++;
  for (int e = 0; e < mesh.ne(); ++e)
    if (!mesh.edge_boundary[e])
      ks.edge_dof[e] = ks.n_vertex_dofs + ks.n_edge_dofs++;

  ks.cell_dofs.assign(mesh.nt(), {-1, -1, -1, -1, -1, -1});
  for (int t = 0; t < mesh.nt(); ++t)
    for (int k = 0; k < 3; ++k) {
      ks.cell_dofs[t][k] = ks.vertex_dof[mesh.triangles[t][k]];
      ks.cell_dofs[t][3 + k] = ks.edge_dof[mesh.tri_edges[t][k]];
    }
  return ks;
}

std::vector<int> cells_around_interior_vertex(const Mesh& mesh, int v) {
  if (mesh.vertex_boundary[v])
    throw SpaceError("vertex " + std::to_string(v) + " is not interior");
  int start = -1;
  for (int t = 0; t < mesh.nt() && start < 0; ++t) {
    const auto& tri = mesh.triangles[t];
    if (tri[0] == v || tri[1] == v || tri[2] == v) start = t;
  }
  if (start < 0) throw SpaceError("dangling vertex");

  // The two edges of t containing v are those opposite the other vertices.
  auto edges_at_v = [&](int t) {
    std::array<int, 2> out{-1, -1};
    int n = 0;
    for (int k = 0; k < 3; ++k)
      if (mesh.triangles[t][k] != v) out[n++] = mesh.tri_edges[t][k];
    return out;
  };
  auto neighbor = [&](int t, int e) {
    return mesh.edge_tris[e][0] == t ? mesh.edge_tris[e][1]
                                     : mesh.edge_tris[e][0];
  };

  std::vector<int> cycle{start};
  const auto e0 = edges_at_v(start);
  int prev = start;
  int cur = std::min(neighbor(start, e0[0]), neighbor(start, e0[1]));
  while (cur != start) {
    if (cur < 0 || static_cast<int>(cycle.size()) > mesh.nt())
      throw SpaceError("broken cell fan around vertex " + std::to_string(v));
    cycle.push_back(cur);
    const auto e = edges_at_v(cur);
    const int n0 = neighbor(cur, e[0]);
    const int next = (n0 == prev) ? neighbor(cur, e[1]) : n0;
    prev = cur;
    cur = next;
  }
  return cycle;
}

Eigen::Matrix<double, 6, 1> StressSpace::cell_modes(
    int cell, const Eigen::VectorXd& coeffs) const {
  Eigen::Matrix<double, 6, 1> m = Eigen::Matrix<double, 6, 1>::Zero();
  for (const auto& [fn, part] : cell_fns[cell])
    m += coeffs(fn) * fns[fn].parts[part].modes;
  return m;
}

SymTensor evaluate_stress_modes(const Eigen::Matrix<double, 6, 1>& modes,
                                const Vec2& p, const Vec2& centroid) {
  SymTensor s;
  for (int k = 0; k < kTensorModes; ++k)
    s += modes(k) * tensor_mode(k, p, centroid);
  return s;
}

Vec2 evaluate_stress_modes_div(const Eigen::Matrix<double, 6, 1>& modes,
                               const Vec2& p, const Vec2& centroid) {
  Vec2 d(0.0, 0.0);
  for (int k = 3; k < kTensorModes; ++k)
    d += modes(k) * tensor_mode_div(k, p, centroid);
  return d;
}

double adjoint_pairing_residual(const Mesh& mesh, const KSSpace& ks,
                                const StressSpace& ss, bool use_threads,
                                int* worst_fn) {
  std::vector<double> fn_max(ss.fns.size(), 0.0);
  parallel_for(
      ss.fns.size(),
      [&](std::size_t i) {
        // A displacement dof can see both parts of a two-cell function, so
        // contributions are summed per dof before taking the modulus.
        std::array<std::pair<int, double>, 12> acc{};
        int n = 0;
        for (const auto& part : ss.fns[i].parts) {
          for (int s = 0; s < 6; ++s) {
            const int dof = ks.cell_dofs[part.cell][s];
            if (dof < 0) continue;
            const double v =
                part.modes.dot(ss.pairing[part.cell].col(s));
            int j = 0;
            while (j < n && acc[j].first != dof) ++j;
            if (j == n) acc[n++] = {dof, v};
            else acc[j].second += v;
          }
        }
        double m = 0.0;
        for (int j = 0; j < n; ++j) m = std::max(m, std::abs(acc[j].second));
        fn_max[i] = m;
      },
      use_threads);
  double m = 0.0;
  int arg = -1;
  for (std::size_t i = 0; i < fn_max.size(); ++i)
    if (fn_max[i] > m) {
      m = fn_max[i];
      arg = static_cast<int>(i);
    }
  if (worst_fn) *worst_fn = arg;
  return m;
}

StressSpace build_stress_space(const Mesh& mesh, const KSSpace& ks,
                               bool use_threads) {
  StressSpace ss;
  ss.duals = build_dual_bases(mesh, use_threads);
  ss.pairing.resize(mesh.nt());
  {
    const QuadRule& rule = quadrature(4);
    parallel_for(
        mesh.nt(),
        [&](std::size_t t) {
          ss.pairing[t] = local_pairing_matrix(mesh, static_cast<int>(t), rule);
        },
        use_threads);
  }

  auto dual_part = [&](int cell, int slot, double coeff) {
    StressFn::Part part;
    part.cell = cell;
    part.dual = Eigen::Matrix<double, 6, 1>::Zero();
    part.dual(slot) = coeff;
    part.modes = coeff * ss.duals[cell].dual.col(slot);
    return part;
  };

  std::vector<std::vector<int>> vertex_cells(mesh.nv());
  for (int t = 0; t < mesh.nt(); ++t)
    for (int v : mesh.triangles[t]) vertex_cells[v].push_back(t);

  // Single-cell functions owned by boundary vertices.
  for (int v = 0; v < mesh.nv(); ++v) {
    if (!mesh.vertex_boundary[v]) continue;
    for (int t : vertex_cells[v]) {
      StressFn fn;
      fn.owner = StressFn::Owner::boundary_vertex;
      fn.entity = v;
      fn.parts.push_back(dual_part(t, vertex_slot(mesh, t, v), 1.0));
      ss.fns.push_back(std::move(fn));
    }
  }

  // Interior vertices: the vertex's own pairing functional collapses to the
  // sum of the per-cell coefficients (asserted below); the chain of
  // adjacent-pair differences spans its nullspace with two-cell supports.
  for (int v = 0; v < mesh.nv(); ++v) {
    if (mesh.vertex_boundary[v]) continue;
    const std::vector<int> fan = cells_around_interior_vertex(mesh, v);
    const int m = static_cast<int>(fan.size());
    std::vector<int> slot(m);
    Eigen::VectorXd r(m);
    bool unit = true;
    for (int i = 0; i < m; ++i) {
      slot[i] = vertex_slot(mesh, fan[i], v);
      r(i) = self_pairing(ss, fan[i], slot[i]);
      unit = unit && std::abs(r(i) - 1.0) <= 1e-10;
    }
    if (unit) {
      for (int i = 0; i + 1 < m; ++i) {
        StressFn fn;
        fn.owner = StressFn::Owner::interior_vertex;
        fn.entity = v;
        fn.parts.push_back(dual_part(fan[i], slot[i], 1.0));
        fn.parts.push_back(dual_part(fan[i + 1], slot[i + 1], -1.0));
        ss.fns.push_back(std::move(fn));
      }
    } else {
      // Nullspace of the measured pairing row.
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.transpose(),
                                            Eigen::ComputeFullV);
      for (int c = 1; c < m; ++c) {
        StressFn fn;
        fn.owner = StressFn::Owner::interior_vertex;
        fn.entity = v;
        for (int i = 0; i < m; ++i)
          fn.parts.push_back(dual_part(fan[i], slot[i], svd.matrixV()(i, c)));
        ss.fns.push_back(std::move(fn));
      }
    }
  }

  // Single-cell functions owned by boundary edges.
  for (int e = 0; e < mesh.ne(); ++e) {
    if (!mesh.edge_boundary[e]) continue;
    StressFn fn;
    fn.owner = StressFn::Owner::boundary_edge;
    fn.entity = e;
    fn.parts.push_back(
        dual_part(mesh.edge_tris[e][0], edge_slot(mesh, mesh.edge_tris[e][0], e), 1.0));
    ss.fns.push_back(std::move(fn));
  }

  // Interior edges: difference of the two edge duals.
  for (int e = 0; e < mesh.ne(); ++e) {
    if (mesh.edge_boundary[e]) continue;
    const int t0 = mesh.edge_tris[e][0];
    const int t1 = mesh.edge_tris[e][1];
    const int s0 = edge_slot(mesh, t0, e);
    const int s1 = edge_slot(mesh, t1, e);
    const double r0 = self_pairing(ss, t0, s0);
    const double r1 = self_pairing(ss, t1, s1);
    StressFn fn;
    fn.owner = StressFn::Owner::interior_edge;
    fn.entity = e;
    if (std::abs(r0 - 1.0) <= 1e-10 && std::abs(r1 - 1.0) <= 1e-10) {
      fn.parts.push_back(dual_part(t0, s0, 1.0));
      fn.parts.push_back(dual_part(t1, s1, -1.0));
    } else {
      fn.parts.push_back(dual_part(t0, s0, 1.0 / r0));
      fn.parts.push_back(dual_part(t1, s1, -1.0 / r1));
    }
    ss.fns.push_back(std::move(fn));
  }

  ss.cell_fns.assign(mesh.nt(), {});
  for (int i = 0; i < ss.dim(); ++i)
    for (int p = 0; p < static_cast<int>(ss.fns[i].parts.size()); ++p)
      ss.cell_fns[ss.fns[i].parts[p].cell].emplace_back(i, p);

  int worst_fn = -1;
  ss.adjoint_residual =
      adjoint_pairing_residual(mesh, ks, ss, use_threads, &worst_fn);
  if (ss.adjoint_residual > 1e-10) {
    const auto& fn = ss.fns[worst_fn];
    throw SpaceError("stress space construction failed: adjoint residual " +
                     std::to_string(ss.adjoint_residual) +
                     " on entity " + std::to_string(fn.entity) + " (group " +
                     std::to_string(static_cast<int>(fn.owner)) + ")");
  }
  return ss;
}

ConstraintSet build_reduced_constraints(const Mesh& mesh,
                                        const StressSpace& ss) {
  std::vector<Triplet> ts;
  for (int t = 0; t < mesh.nt(); ++t)
    for (const auto& [fn, part] : ss.cell_fns[t]) {
      const double q = ss.fns[fn].parts[part].modes(5);
      if (q != 0.0) ts.push_back({t, fn, q});
    }
  ConstraintSet cs;
  cs.kind = ConstraintSet::Kind::stress_div_p0;
  cs.parent_dim = ss.dim();
  cs.rows = SparseMatrix::from_triplets(mesh.nt(), ss.dim(), std::move(ts));
  return cs;
}

Eigen::MatrixXd constraint_nullspace(const ConstraintSet& cs) {
  const Eigen::MatrixXd a = to_dense(cs.rows);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  return lu.kernel();
}

Eigen::Matrix<double, 5, 1> pairing_vs_strain_minimal(const Mesh& mesh,
                                                      const StressSpace& ss,
                                                      int fn, int cell) {
  const QuadRule& rule = quadrature(4);
  const Vec2 c = mesh.centroid(cell);
  Eigen::Matrix<double, 6, 1> w = Eigen::Matrix<double, 6, 1>::Zero();
  for (const auto& part : ss.fns[fn].parts)
    if (part.cell == cell) w += part.modes;
  Eigen::Matrix<double, 5, 1> out;
  for (int k = 0; k < kStrainMinimalModes; ++k) {
    const SymTensor eps = strain_minimal_mode_strain(k);
    out(k) = integrate(mesh, cell, rule, [&](const Vec2& p) {
      return evaluate_stress_modes_div(w, p, c).dot(strain_minimal_mode(k, p, c)) +
             evaluate_stress_modes(w, p, c).contract(eps);
    });
  }
  return out;
}

ConstraintSet build_vrks_constraints(const Mesh& mesh, const StressSpace& ss,
                                     const ConstraintSet& reduced) {
  const Eigen::MatrixXd z = constraint_nullspace(reduced);  // dim x k
  // Sparse pairing of every stress basis function against the strain-minimal
  // modes of the cells it touches.
  std::vector<Triplet> pts;
  for (int t = 0; t < mesh.nt(); ++t) {
    std::vector<int> seen;
    for (const auto& [fn, part] : ss.cell_fns[t]) {
      (void)part;
      if (std::find(seen.begin(), seen.end(), fn) != seen.end()) continue;
      seen.push_back(fn);
      const auto row = pairing_vs_strain_minimal(mesh, ss, fn, t);
      for (int k = 0; k < kStrainMinimalModes; ++k)
        if (row(k) != 0.0) pts.push_back({fn, 5 * t + k, row(k)});
    }
  }
  const SparseMatrix p = SparseMatrix::from_triplets(
      ss.dim(), 5 * mesh.nt(), std::move(pts));
  const Eigen::MatrixXd rows = z.transpose() * to_dense(p);

  std::vector<Triplet> ts;
  for (int r = 0; r < rows.rows(); ++r)
    for (int c = 0; c < rows.cols(); ++c)
      if (rows(r, c) != 0.0) ts.push_back({r, c, rows(r, c)});
  ConstraintSet cs;
  cs.kind = ConstraintSet::Kind::displacement_pairing;
  cs.parent_dim = 5 * mesh.nt();
  cs.rows = SparseMatrix::from_triplets(static_cast<int>(rows.rows()),
                                        5 * mesh.nt(), std::move(ts));
  return cs;
}

}  // namespace hrks
