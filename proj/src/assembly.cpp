#include "hrks/assembly.hpp"

#include "hrks/parallel.hpp"

namespace hrks {

namespace {

// Two-phase deterministic assembly: per-cell triplet chunks are computed in
// parallel, then concatenated in cell order, so the summation order (and the
// resulting bits) match the straightforward serial loop.
template <class CellFn>
SparseMatrix assemble_cells(int rows, int cols, int nt, CellFn&& cell_fn,
                            bool use_threads) {
  std::vector<std::vector<Triplet>> chunks(nt);
  parallel_for(
      nt, [&](std::size_t t) { cell_fn(static_cast<int>(t), chunks[t]); },
      use_threads);
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.size();
  all.reserve(total);
  for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return SparseMatrix::from_triplets(rows, cols, std::move(all));
}

// Symmetric pairwise form over the stress functions touching a cell.
template <class ModeForm>
void stress_pair_chunk(const StressSpace& ss, int t, const ModeForm& x,
                       std::vector<Triplet>& out) {
  const auto& touching = ss.cell_fns[t];
  for (const auto& [i, pi] : touching) {
    const auto& wi = ss.fns[i].parts[pi].modes;
    for (const auto& [j, pj] : touching) {
      const auto& wj = ss.fns[j].parts[pj].modes;
      out.push_back({i, j, wi.dot(x * wj)});
    }
  }
}

}  // namespace

CellModeForms cell_mode_forms(const Mesh& mesh, int cell,
                              const LameParams& params) {
  const QuadRule& rule = quadrature(4);
  const Vec2 c = mesh.centroid(cell);
  const double area = mesh.area(cell);
  CellModeForms f;

  for (int p = 0; p < 6; ++p) {
    SymTensor mean;
    mean.xx = integrate(mesh, cell, rule, [&](const Vec2& q) {
                return tensor_mode(p, q, c).xx;
              }) / area;
    mean.xy = integrate(mesh, cell, rule, [&](const Vec2& q) {
                return tensor_mode(p, q, c).xy;
              }) / area;
    mean.yy = integrate(mesh, cell, rule, [&](const Vec2& q) {
                return tensor_mode(p, q, c).yy;
              }) / area;
    f.mode_mean[p] = mean;
  }

  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      f.compliance(p, q) = integrate(mesh, cell, rule, [&](const Vec2& x) {
        return compliance_apply(tensor_mode(p, x, c), params)
            .contract(tensor_mode(q, x, c));
      });
      f.compliance_p0(p, q) =
          area *
          compliance_apply(f.mode_mean[p], params).contract(f.mode_mean[q]);
      f.mass(p, q) = integrate(mesh, cell, rule, [&](const Vec2& x) {
        return tensor_mode(p, x, c).contract(tensor_mode(q, x, c));
      });
      f.div_div(p, q) = integrate(mesh, cell, rule, [&](const Vec2& x) {
        return tensor_mode_div(p, x, c).dot(tensor_mode_div(q, x, c));
      });
    }

  for (int p = 0; p < 6; ++p) {
    for (int k = 0; k < 3; ++k)
      f.div_rigid(p, k) = integrate(mesh, cell, rule, [&](const Vec2& x) {
        return tensor_mode_div(p, x, c).dot(rigid_mode(k, x, c));
      });
    for (int k = 0; k < 2; ++k) f.div_constant(p, k) = f.div_rigid(p, k);
  }
  return f;
}

SparseMatrix assemble_A(const Mesh& mesh, const StressSpace& ss,
                        const LameParams& params, bool projected,
                        bool use_threads) {
  return assemble_cells(
      ss.dim(), ss.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const CellModeForms f = cell_mode_forms(mesh, t, params);
        stress_pair_chunk(ss, t, projected ? f.compliance_p0 : f.compliance,
                          out);
      },
      use_threads);
}

SparseMatrix assemble_stress_mass(const Mesh& mesh, const StressSpace& ss,
                                  bool use_threads) {
  return assemble_cells(
      ss.dim(), ss.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        stress_pair_chunk(ss, t, cell_mode_forms(mesh, t, {}).mass, out);
      },
      use_threads);
}

SparseMatrix assemble_stress_divdiv(const Mesh& mesh, const StressSpace& ss,
                                    bool use_threads) {
  return assemble_cells(
      ss.dim(), ss.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        stress_pair_chunk(ss, t, cell_mode_forms(mesh, t, {}).div_div, out);
      },
      use_threads);
}

SparseMatrix assemble_B_rigid(const Mesh& mesh, const StressSpace& ss,
                              bool use_threads) {
  return assemble_cells(
      3 * mesh.nt(), ss.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const auto f = cell_mode_forms(mesh, t, {});
        for (const auto& [i, pi] : ss.cell_fns[t]) {
          const Eigen::Vector3d v =
              f.div_rigid.transpose() * ss.fns[i].parts[pi].modes;
          for (int k = 0; k < 3; ++k)
            if (v(k) != 0.0) out.push_back({3 * t + k, i, v(k)});
        }
      },
      use_threads);
}

SparseMatrix assemble_B_constant(const Mesh& mesh, const StressSpace& ss,
                                 bool use_threads) {
  return assemble_cells(
      2 * mesh.nt(), ss.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const auto f = cell_mode_forms(mesh, t, {});
        for (const auto& [i, pi] : ss.cell_fns[t]) {
          const Eigen::Vector2d v =
              f.div_constant.transpose() * ss.fns[i].parts[pi].modes;
          for (int k = 0; k < 2; ++k)
            if (v(k) != 0.0) out.push_back({2 * t + k, i, v(k)});
        }
      },
      use_threads);
}

Eigen::VectorXd assemble_load_rigid(const Mesh& mesh, const CellLoadFn& f,
                                    const QuadRule& rule, bool use_threads) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * mesh.nt());
  parallel_for(
      mesh.nt(),
      [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        const Vec2 c = mesh.centroid(t);
        for (int k = 0; k < 3; ++k)
          b(3 * t + k) = integrate(mesh, t, rule, [&](const Vec2& p) {
            return f(t, p).dot(rigid_mode(k, p, c));
          });
      },
      use_threads);
  return b;
}

Eigen::VectorXd assemble_load_constant(const Mesh& mesh, const CellLoadFn& f,
                                       const QuadRule& rule, bool use_threads) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * mesh.nt());
  parallel_for(
      mesh.nt(),
      [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        for (int k = 0; k < 2; ++k)
          b(2 * t + k) = integrate(mesh, t, rule,
                                   [&](const Vec2& p) { return f(t, p)(k); });
      },
      use_threads);
  return b;
}

SparseMatrix assemble_ks_stiffness(const Mesh& mesh, const KSSpace& ks,
                                   const LameParams& params, bool use_threads) {
  return assemble_cells(
      ks.dim(), ks.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const double area = mesh.area(t);
        std::array<SymTensor, 6> eps;
        for (int s = 0; s < 6; ++s) eps[s] = local_test_strain(mesh, t, s);
        for (int s = 0; s < 6; ++s) {
          const int ds = ks.cell_dofs[t][s];
          if (ds < 0) continue;
          const SymTensor cs = elasticity_apply(eps[s], params);
          for (int u = 0; u < 6; ++u) {
            const int du = ks.cell_dofs[t][u];
            if (du < 0) continue;
            out.push_back({ds, du, area * cs.contract(eps[u])});
          }
        }
      },
      use_threads);
}

Eigen::VectorXd assemble_ks_load(const Mesh& mesh, const KSSpace& ks,
                                 const CellLoadFn& f, const QuadRule& rule,
                                 RhsProjector projector, bool use_threads) {
  std::vector<std::array<double, 6>> cell_vals(mesh.nt());
  parallel_for(
      mesh.nt(),
      [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        for (int s = 0; s < 6; ++s) {
          if (ks.cell_dofs[t][s] < 0) {
            cell_vals[t][s] = 0.0;
            continue;
          }
          if (projector == RhsProjector::identity) {
            cell_vals[t][s] = integrate(mesh, t, rule, [&](const Vec2& p) {
              return f(t, p).dot(local_test(mesh, t, s, p));
            });
          } else {
            // Hat and Crouzeix-Raviart functions both have cell mean 1/3.
            const int comp = s < 3 ? 0 : 1;
            cell_vals[t][s] =
                integrate(mesh, t, rule,
                          [&](const Vec2& p) { return f(t, p)(comp); }) /
                3.0;
          }
        }
      },
      use_threads);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ks.dim());
  for (int t = 0; t < mesh.nt(); ++t)
    for (int s = 0; s < 6; ++s) {
      const int d = ks.cell_dofs[t][s];
      if (d >= 0) b(d) += cell_vals[t][s];
    }
  return b;
}

SparseMatrix assemble_ks_mass(const Mesh& mesh, const KSSpace& ks,
                              bool use_threads) {
  const QuadRule& rule = quadrature(4);
  return assemble_cells(
      ks.dim(), ks.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        for (int s = 0; s < 6; ++s) {
          const int ds = ks.cell_dofs[t][s];
          if (ds < 0) continue;
          for (int u = 0; u < 6; ++u) {
            const int du = ks.cell_dofs[t][u];
            if (du < 0) continue;
            out.push_back({ds, du, integrate(mesh, t, rule, [&](const Vec2& p) {
                             return local_test(mesh, t, s, p)
                                 .dot(local_test(mesh, t, u, p));
                           })});
          }
        }
      },
      use_threads);
}

SparseMatrix assemble_ks_strain_gram(const Mesh& mesh, const KSSpace& ks,
                                     bool use_threads) {
  return assemble_cells(
      ks.dim(), ks.dim(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const double area = mesh.area(t);
        for (int s = 0; s < 6; ++s) {
          const int ds = ks.cell_dofs[t][s];
          if (ds < 0) continue;
          const SymTensor es = local_test_strain(mesh, t, s);
          for (int u = 0; u < 6; ++u) {
            const int du = ks.cell_dofs[t][u];
            if (du < 0) continue;
            out.push_back(
                {ds, du, area * es.contract(local_test_strain(mesh, t, u))});
          }
        }
      },
      use_threads);
}

SparseMatrix assemble_strain_minimal_stiffness(const Mesh& mesh,
                                               const LameParams& params,
                                               bool use_threads) {
  return assemble_cells(
      5 * mesh.nt(), 5 * mesh.nt(), mesh.nt(),
      [&](int t, std::vector<Triplet>& out) {
        const double area = mesh.area(t);
        for (int i = 0; i < kStrainMinimalModes; ++i) {
          const SymTensor ci =
              elasticity_apply(strain_minimal_mode_strain(i), params);
          for (int j = 0; j < kStrainMinimalModes; ++j) {
            const double v =
                area * ci.contract(strain_minimal_mode_strain(j));
            if (v != 0.0) out.push_back({5 * t + i, 5 * t + j, v});
          }
        }
      },
      use_threads);
}

Eigen::VectorXd assemble_strain_minimal_load(const Mesh& mesh,
                                             const CellLoadFn& f,
                                             const QuadRule& rule,
                                             RhsProjector projector,
                                             bool use_threads) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(5 * mesh.nt());
  parallel_for(
      mesh.nt(),
      [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        const Vec2 c = mesh.centroid(t);
        for (int k = 0; k < kStrainMinimalModes; ++k) {
          if (projector == RhsProjector::identity) {
            b(5 * t + k) = integrate(mesh, t, rule, [&](const Vec2& p) {
              return f(t, p).dot(strain_minimal_mode(k, p, c));
            });
          } else {
            // Centroid-shifted non-constant modes have zero cell mean.
            if (k >= 2) {
              b(5 * t + k) = 0.0;
            } else {
              b(5 * t + k) = integrate(
                  mesh, t, rule, [&](const Vec2& p) { return f(t, p)(k); });
            }
          }
        }
      },
      use_threads);
  return b;
}



Eigen::VectorXd rigid_load_vector(const Mesh& mesh,
                                  const std::vector<Eigen::Vector3d>& f_rigid) {
  const QuadRule& rule = quadrature(4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * mesh.nt());
  for (int t = 0; t < mesh.nt(); ++t) {
    const Vec2 c = mesh.centroid(t);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        m(i, j) = integrate(mesh, t, rule, [&](const Vec2& p) {
          return rigid_mode(i, p, c).dot(rigid_mode(j, p, c));
        });
    b.segment<3>(3 * t) = m * f_rigid[t];
  }
  return b;
}

}  // namespace hrks
