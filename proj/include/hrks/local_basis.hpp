#pragma once

#include <vector>

#include "hrks/geometry.hpp"
#include "hrks/mesh.hpp"
#include "hrks/quadrature.hpp"

namespace hrks {

// Per-cell polynomial shape spaces in coordinates shifted to the cell
// centroid (the shift spans the same spaces and keeps local matrices well
// conditioned under refinement).
//
// Symmetric tensor modes (the quadratic mode is last):
//   0: (1,0;0,0)  1: (0,1;1,0)  2: (0,0;0,1)
//   3: (0,x;x,0)  4: (0,y;y,0)  5: (0,x^2-y^2;x^2-y^2,0)
// Vector modes:
//   full linears     (1,0),(0,1),(x,0),(y,0),(0,x),(0,y)
//   strain-minimal   (1,0),(0,1),(x,0),(y,x),(0,y)
//   rigid motions    (1,0),(0,1),(y,-x)
inline constexpr int kTensorModes = 6;
inline constexpr int kReducedTensorModes = 5;
inline constexpr int kLinearModes = 6;
inline constexpr int kStrainMinimalModes = 5;
inline constexpr int kRigidModes = 3;

SymTensor tensor_mode(int k, const Vec2& p, const Vec2& centroid);
Vec2 tensor_mode_div(int k, const Vec2& p, const Vec2& centroid);

Vec2 linear_mode(int k, const Vec2& p, const Vec2& centroid);
SymTensor linear_mode_strain(int k);

Vec2 strain_minimal_mode(int k, const Vec2& p, const Vec2& centroid);
SymTensor strain_minimal_mode_strain(int k);

Vec2 rigid_mode(int k, const Vec2& p, const Vec2& centroid);

/// Local test functions tied to the displacement space: slots 0..2 are the
/// vertex hat functions in component 1, slots 3..5 the Crouzeix-Raviart edge
/// functions (edge opposite local vertex k) in component 2.
Vec2 local_test(const Mesh& mesh, int cell, int slot, const Vec2& p);
SymTensor local_test_strain(const Mesh& mesh, int cell, int slot);

/// Twisted pairing (div tau, v)_T + (tau, eps(v))_T of tensor mode r against
/// test slot s; entries computed with the given quadrature (degree >= 4).
Eigen::Matrix<double, 6, 6> local_pairing_matrix(const Mesh& mesh, int cell,
                                                 const QuadRule& rule);

/// Dual basis of the local tensor modes: column s of `dual` gives the mode
/// coefficients of the function pairing to 1 against test slot s and to 0
/// against the others (vertex duals first, then edge duals).
struct LocalTensorBasis {
  int cell = -1;
  Eigen::Matrix<double, 6, 6> dual;
};

LocalTensorBasis local_dual_basis(const Mesh& mesh, int cell,
                                  const QuadRule& rule);

/// Dual bases for every cell; OpenMP across cells, use_threads=false is the
/// serial reference.
std::vector<LocalTensorBasis> build_dual_bases(const Mesh& mesh,
                                               bool use_threads = true);

/// Rank/nullspace verification of the per-cell kernel and range identities:
/// div on the 6-mode tensor space has the constant tensors as kernel and the
/// rigid motions as range; eps on the full linears has the rigid motions as
/// kernel; div on the 5-mode tensor space has the constants as range; eps on
/// the strain-minimal modes has the constants as kernel. Returns the largest
/// subspace-angle defect over all five statements.
struct KernelRangeReport {
  double max_defect = 0.0;
  int div_kernel_dim = 0;       // expected 3
  int div_range_dim = 0;        // expected 3
  int eps_kernel_dim = 0;       // expected 3
  int reduced_div_range_dim = 0;  // expected 2
  int minimal_eps_kernel_dim = 0; // expected 2
};

KernelRangeReport local_kernel_range_check(const Mesh& mesh, int cell);

}  // namespace hrks
