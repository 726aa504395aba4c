#pragma once

#include <functional>

#include "hrks/elasticity.hpp"
#include "hrks/sparse.hpp"
#include "hrks/spaces.hpp"

namespace hrks {

using LoadFn = std::function<Vec2(const Vec2&)>;
/// Load evaluated with the containing cell known; supports discontinuous
/// piecewise loads such as cell-wise projections.
using CellLoadFn = std::function<Vec2(int cell, const Vec2&)>;

inline CellLoadFn cellwise(const LoadFn& f) {
  return [f](int, const Vec2& p) { return f(p); };
}

/// Cell-wise mode-level integrals used by all stress forms (degree-4 rule).
struct CellModeForms {
  Eigen::Matrix<double, 6, 6> compliance;        // (A m_p, m_q)_T
  Eigen::Matrix<double, 6, 6> compliance_p0;     // (A P0 m_p, P0 m_q)_T
  Eigen::Matrix<double, 6, 6> mass;              // (m_p, m_q)_T
  Eigen::Matrix<double, 6, 6> div_div;           // (div m_p, div m_q)_T
  Eigen::Matrix<double, 6, 3> div_rigid;         // (div m_p, r_k)_T
  Eigen::Matrix<double, 6, 2> div_constant;      // (div m_p, e_k)_T
  std::array<SymTensor, 6> mode_mean;            // P0 of each mode
};

CellModeForms cell_mode_forms(const Mesh& mesh, int cell,
                              const LameParams& params);

/// Stress-stress compliance form over the stress basis; `projected`
/// replaces both arguments by their cell-wise averages.
SparseMatrix assemble_A(const Mesh& mesh, const StressSpace& ss,
                        const LameParams& params, bool projected = false,
                        bool use_threads = true);

/// Plain L2 Gram of the stress basis.
SparseMatrix assemble_stress_mass(const Mesh& mesh, const StressSpace& ss,
                                  bool use_threads = true);

/// Gram of cell-wise divergences of the stress basis.
SparseMatrix assemble_stress_divdiv(const Mesh& mesh, const StressSpace& ss,
                                    bool use_threads = true);

/// Divergence pairing against the piecewise-rigid space (rows 3 per cell) or
/// the piecewise-constant space (rows 2 per cell).
SparseMatrix assemble_B_rigid(const Mesh& mesh, const StressSpace& ss,
                              bool use_threads = true);
SparseMatrix assemble_B_constant(const Mesh& mesh, const StressSpace& ss,
                                 bool use_threads = true);

/// Load functionals (f, r_k)_T / (f, e_k)_T with the given quadrature.
Eigen::VectorXd assemble_load_rigid(const Mesh& mesh, const CellLoadFn& f,
                                    const QuadRule& rule,
                                    bool use_threads = true);
Eigen::VectorXd assemble_load_constant(const Mesh& mesh, const CellLoadFn& f,
                                       const QuadRule& rule,
                                       bool use_threads = true);

enum class RhsProjector { identity, cellwise_constant };

/// Stiffness (C eps_h u, eps_h v) on the displacement space; symmetric
/// positive definite.
SparseMatrix assemble_ks_stiffness(const Mesh& mesh, const KSSpace& ks,
                                   const LameParams& params,
                                   bool use_threads = true);

/// Load (f, v) or (f, P0 v) on the displacement space.
Eigen::VectorXd assemble_ks_load(const Mesh& mesh, const KSSpace& ks,
                                 const CellLoadFn& f, const QuadRule& rule,
                                 RhsProjector projector = RhsProjector::identity,
                                 bool use_threads = true);

/// Vector mass and strain Gram on the displacement space (spectral checks).
SparseMatrix assemble_ks_mass(const Mesh& mesh, const KSSpace& ks,
                              bool use_threads = true);
SparseMatrix assemble_ks_strain_gram(const Mesh& mesh, const KSSpace& ks,
                                     bool use_threads = true);

/// Block-diagonal forms over the per-cell strain-minimal modes (5 per cell):
/// stiffness (C eps m_i, eps m_j)_T and load (f, m_i)_T or (f, P0 m_i)_T.
SparseMatrix assemble_strain_minimal_stiffness(const Mesh& mesh,
                                               const LameParams& params,
                                               bool use_threads = true);
Eigen::VectorXd assemble_strain_minimal_load(
    const Mesh& mesh, const CellLoadFn& f, const QuadRule& rule,
    RhsProjector projector = RhsProjector::identity, bool use_threads = true);

/// (f_h, r_k)_T for a piecewise-rigid load given by per-cell coefficients.
Eigen::VectorXd rigid_load_vector(const Mesh& mesh,
                                  const std::vector<Eigen::Vector3d>& f_rigid);

}  // namespace hrks
