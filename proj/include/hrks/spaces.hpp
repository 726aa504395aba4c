#pragma once

#include <vector>

#include "hrks/local_basis.hpp"
#include "hrks/mesh.hpp"
#include "hrks/sparse.hpp"

namespace hrks {

struct SpaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Kouhia-Stenberg displacement space: one scalar degree of freedom per
/// interior vertex (conforming hat in component 1) and one per interior edge
/// (Crouzeix-Raviart in component 2).
struct KSSpace {
  int n_vertex_dofs = 0;
  int n_edge_dofs = 0;
  std::vector<int> vertex_dof;  // -1 on the boundary
  std::vector<int> edge_dof;    // -1 on the boundary
  // Per-cell slot -> global dof (-1 if the entity is on the boundary);
  // slots 0..2 vertices, 3..5 edges, matching local_test.
  std::vector<std::array<int, 6>> cell_dofs;

  int dim() const { return n_vertex_dofs + n_edge_dofs; }

  /// Value of the member with the given coefficients at p inside cell t.
  Vec2 evaluate(const Mesh& mesh, int cell, const Vec2& p,
                const Eigen::VectorXd& coeffs) const;
  /// Cell-wise symmetric gradient (constant per cell).
  SymTensor strain(const Mesh& mesh, int cell, const Eigen::VectorXd& coeffs) const;
};

KSSpace build_ks_space(const Mesh& mesh);

/// One global basis function of the stress space: locally a combination of
/// the cell dual functions, supported on one cell or on a two-cell edge
/// patch. `modes` caches the coefficients in tensor-mode coordinates.
struct StressFn {
  enum class Owner { boundary_vertex = 1, interior_vertex = 2, boundary_edge = 3, interior_edge = 4 };
  Owner owner;
  int entity = -1;
  struct Part {
    int cell = -1;
    Eigen::Matrix<double, 6, 1> dual;
    Eigen::Matrix<double, 6, 1> modes;
  };
  std::vector<Part> parts;
};

/// Stress space with locally supported basis; built so that the discrete
/// adjoint identity against the displacement space holds to 1e-10, which is
/// asserted after construction.
struct StressSpace {
  std::vector<LocalTensorBasis> duals;                    // per cell
  std::vector<Eigen::Matrix<double, 6, 6>> pairing;       // per cell
  std::vector<StressFn> fns;
  std::vector<std::vector<std::pair<int, int>>> cell_fns; // (fn, part)
  double adjoint_residual = 0.0;

  int dim() const { return static_cast<int>(fns.size()); }

  /// Tensor-mode coefficients of the member with the given coefficients,
  /// restricted to one cell.
  Eigen::Matrix<double, 6, 1> cell_modes(int cell,
                                         const Eigen::VectorXd& coeffs) const;
};

StressSpace build_stress_space(const Mesh& mesh, const KSSpace& ks,
                               bool use_threads = true);

/// Cells incident to an interior vertex in cyclic order, starting from the
/// lowest cell index and walking towards its lower-numbered neighbour.
std::vector<int> cells_around_interior_vertex(const Mesh& mesh, int v);

/// max |(div tau, v) + (tau, eps_h v)| over all pairs of stress and
/// displacement basis functions; optionally reports the worst function.
double adjoint_pairing_residual(const Mesh& mesh, const KSSpace& ks,
                                const StressSpace& ss, bool use_threads = true,
                                int* worst_fn = nullptr);

/// Evaluation of a stress member from per-cell mode coefficients.
SymTensor evaluate_stress_modes(const Eigen::Matrix<double, 6, 1>& modes,
                                const Vec2& p, const Vec2& centroid);
Vec2 evaluate_stress_modes_div(const Eigen::Matrix<double, 6, 1>& modes,
                               const Vec2& p, const Vec2& centroid);

/// L2 projections onto the piecewise rigid and piecewise constant spaces
/// (coefficients in the centroid-shifted rigid / constant modes).
template <class F>
Eigen::Vector3d project_rigid(const Mesh& mesh, int cell, const QuadRule& rule,
                              F&& field) {
  const Vec2 c = mesh.centroid(cell);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      m(i, j) = integrate(mesh, cell, rule, [&](const Vec2& p) {
        return rigid_mode(i, p, c).dot(rigid_mode(j, p, c));
      });
      m(j, i) = m(i, j);
    }
    rhs(i) = integrate(mesh, cell, rule, [&](const Vec2& p) {
      return Vec2(field(p)).dot(rigid_mode(i, p, c));
    });
  }
  return m.ldlt().solve(rhs);
}

template <class F>
Eigen::Vector2d project_constant(const Mesh& mesh, int cell,
                                 const QuadRule& rule, F&& field) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int k = 0; k < 2; ++k)
    mean(k) = integrate(mesh, cell, rule,
                        [&](const Vec2& p) { return Vec2(field(p))(k); }) /
              mesh.area(cell);
  return mean;
}

/// Sparse constraint rows describing a reduced space inside a parent
/// coefficient space.
struct ConstraintSet {
  enum class Kind {
    stress_div_p0,         // per-cell quadratic-mode coefficient = 0
    displacement_pairing,  // adjoint pairing against the reduced stresses = 0
  };
  Kind kind;
  int parent_dim = 0;
  SparseMatrix rows;
};

/// Reduction of the stress space to cell-wise constant divergence: one row
/// per cell extracting the net quadratic-mode coefficient.
ConstraintSet build_reduced_constraints(const Mesh& mesh, const StressSpace& ss);

/// Constraints carving the minimal displacement space out of the
/// strain-minimal modes (5 per cell): pairing rows against a spanning set of
/// the reduced stress space. Dense nullspace computation; intended for
/// meshes with 5*nt within the dense-solve guard.
ConstraintSet build_vrks_constraints(const Mesh& mesh, const StressSpace& ss,
                                     const ConstraintSet& reduced);

/// Dense nullspace basis of a constraint set (columns span the reduced
/// space inside the parent coefficient space).
Eigen::MatrixXd constraint_nullspace(const ConstraintSet& cs);

/// Adjoint pairing of one stress basis function against the strain-minimal
/// modes of cell `cell` (a 5-vector); zero when the function does not touch
/// the cell.
Eigen::Matrix<double, 5, 1> pairing_vs_strain_minimal(const Mesh& mesh,
                                                      const StressSpace& ss,
                                                      int fn, int cell);

}  // namespace hrks
