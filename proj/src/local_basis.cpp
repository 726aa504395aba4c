#include "hrks/local_basis.hpp"

#include <cmath>
#include <stdexcept>

#include "hrks/parallel.hpp"

namespace hrks {

SymTensor tensor_mode(int k, const Vec2& p, const Vec2& c) {
  const double x = p.x() - c.x(), y = p.y() - c.y();
  switch (k) {
    case 0: return {1.0, 0.0, 0.0};
    case 1: return {0.0, 1.0, 0.0};
    case 2: return {0.0, 0.0, 1.0};
    case 3: return {0.0, x, 0.0};
    case 4: return {0.0, y, 0.0};
    case 5: return {0.0, x * x - y * y, 0.0};
    default: throw std::out_of_range("tensor_mode");
  }
}

Vec2 tensor_mode_div(int k, const Vec2& p, const Vec2& c) {
  const double x = p.x() - c.x(), y = p.y() - c.y();
  switch (k) {
    case 0:
    case 1:
    case 2: return Vec2(0.0, 0.0);
    case 3: return Vec2(0.0, 1.0);
    case 4: return Vec2(1.0, 0.0);
    case 5: return Vec2(-2.0 * y, 2.0 * x);
    default: throw std::out_of_range("tensor_mode_div");
  }
}

Vec2 linear_mode(int k, const Vec2& p, const Vec2& c) {
  const double x = p.x() - c.x(), y = p.y() - c.y();
  switch (k) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(0.0, 1.0);
    case 2: return Vec2(x, 0.0);
    case 3: return Vec2(y, 0.0);
    case 4: return Vec2(0.0, x);
    case 5: return Vec2(0.0, y);
    default: throw std::out_of_range("linear_mode");
  }
}

SymTensor linear_mode_strain(int k) {
  switch (k) {
    case 0:
    case 1: return {0.0, 0.0, 0.0};
    case 2: return {1.0, 0.0, 0.0};
    case 3: return {0.0, 0.5, 0.0};
    case 4: return {0.0, 0.5, 0.0};
    case 5: return {0.0, 0.0, 1.0};
    default: throw std::out_of_range("linear_mode_strain");
  }
}

Vec2 strain_minimal_mode(int k, const Vec2& p, const Vec2& c) {
  const double x = p.x() - c.x(), y = p.y() - c.y();
  switch (k) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(0.0, 1.0);
    case 2: return Vec2(x, 0.0);
    case 3: return Vec2(y, x);
    case 4: return Vec2(0.0, y);
    default: throw std::out_of_range("strain_minimal_mode");
  }
}

SymTensor strain_minimal_mode_strain(int k) {
  switch (k) {
    case 0:
    case 1: return {0.0, 0.0, 0.0};
    case 2: return {1.0, 0.0, 0.0};
    case 3: return {0.0, 1.0, 0.0};
    case 4: return {0.0, 0.0, 1.0};
    default: throw std::out_of_range("strain_minimal_mode_strain");
  }
}

Vec2 rigid_mode(int k, const Vec2& p, const Vec2& c) {
  const double x = p.x() - c.x(), y = p.y() - c.y();
  switch (k) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(0.0, 1.0);
    case 2: return Vec2(y, -x);
    default: throw std::out_of_range("rigid_mode");
  }
}

Vec2 local_test(const Mesh& mesh, int cell, int slot, const Vec2& p) {
  const auto l = mesh.barycentric(cell, p);
  if (slot < 3) return Vec2(l[slot], 0.0);
  // Crouzeix-Raviart function of the edge opposite local vertex slot-3.
  return Vec2(0.0, 1.0 - 2.0 * l[slot - 3]);
}

SymTensor local_test_strain(const Mesh& mesh, int cell, int slot) {
  const auto g = mesh.barycentric_gradients(cell);
  if (slot < 3) {
    const Vec2 gr = g[slot];
    return {gr.x(), 0.5 * gr.y(), 0.0};
  }
  const Vec2 gr = -2.0 * g[slot - 3];
  return {0.0, 0.5 * gr.x(), gr.y()};
}

Eigen::Matrix<double, 6, 6> local_pairing_matrix(const Mesh& mesh, int cell,
                                                 const QuadRule& rule) {
  const Vec2 c = mesh.centroid(cell);
  Eigen::Matrix<double, 6, 6> m;
  for (int s = 0; s < 6; ++s) {
    const SymTensor eps = local_test_strain(mesh, cell, s);
    for (int r = 0; r < 6; ++r) {
      m(r, s) = integrate(mesh, cell, rule, [&](const Vec2& p) {
        return tensor_mode_div(r, p, c).dot(local_test(mesh, cell, s, p)) +
               tensor_mode(r, p, c).contract(eps);
      });
    }
  }
  return m;
}

LocalTensorBasis local_dual_basis(const Mesh& mesh, int cell,
                                  const QuadRule& rule) {
  const Eigen::Matrix<double, 6, 6> m = local_pairing_matrix(mesh, cell, rule);
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m.transpose());
  if (!lu.isInvertible())
    throw std::runtime_error("degenerate cell: singular local pairing matrix, cell " +
                             std::to_string(cell));
  LocalTensorBasis b;
  b.cell = cell;
  b.dual = lu.solve(Eigen::Matrix<double, 6, 6>::Identity());
  const double resid =
      (m.transpose() * b.dual - Eigen::Matrix<double, 6, 6>::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (resid > 1e-10)
    throw std::runtime_error("local dual basis residual " +
                             std::to_string(resid) + " on cell " +
                             std::to_string(cell));
  return b;
}

std::vector<LocalTensorBasis> build_dual_bases(const Mesh& mesh,
                                               bool use_threads) {
  const QuadRule& rule = quadrature(4);
  std::vector<LocalTensorBasis> out(mesh.nt());
  parallel_for(
      mesh.nt(), [&](std::size_t t) { out[t] = local_dual_basis(mesh, static_cast<int>(t), rule); },
      use_threads);
  return out;
}

namespace {

// Orthonormal basis of the column span via SVD.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& a, double tol, int* rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = tol * (s.size() ? s(0) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  if (rank) *rank = r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the nullspace of a.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a, double tol, int* dim) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = tol * (s.size() ? s(0) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  const int n = static_cast<int>(a.cols()) - r;
  if (dim) *dim = n;
  return svd.matrixV().rightCols(n);
}

// Largest principal-angle defect between two subspaces given by orthonormal
// bases u and v (0 when they coincide).
double subspace_defect(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.cols() != v.cols()) return 1.0;
  if (u.cols() == 0) return 0.0;
  const Eigen::MatrixXd r = u - v * (v.transpose() * u);
  return r.norm();
}

}  // namespace

KernelRangeReport local_kernel_range_check(const Mesh& mesh, int cell) {
  const QuadRule& rule = quadrature(4);
  const Vec2 c = mesh.centroid(cell);
  const double tol = 1e-8;
  KernelRangeReport rep;

  // L2 projections onto the rigid and constant-tensor spaces give the
  // operator matrices in mode coordinates.
  Eigen::Matrix3d rigid_mass;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rigid_mass(i, j) = integrate(mesh, cell, rule, [&](const Vec2& p) {
        return rigid_mode(i, p, c).dot(rigid_mode(j, p, c));
      });

  // div on the full tensor modes, coordinates in the rigid basis.
  Eigen::MatrixXd div_full(3, kTensorModes);
  for (int k = 0; k < kTensorModes; ++k) {
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i)
      rhs(i) = integrate(mesh, cell, rule, [&](const Vec2& p) {
        return tensor_mode_div(k, p, c).dot(rigid_mode(i, p, c));
      });
    div_full.col(k) = rigid_mass.ldlt().solve(rhs);
  }

  {
    int dim = 0;
    const Eigen::MatrixXd kern = null_basis(div_full, tol, &dim);
    rep.div_kernel_dim = dim;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(kTensorModes, 3);
    expected.block<3, 3>(0, 0).setIdentity();
    rep.max_defect = std::max(rep.max_defect, subspace_defect(kern, expected));

    int rank = 0;
    const Eigen::MatrixXd range = span_basis(div_full, tol, &rank);
    rep.div_range_dim = rank;
    rep.max_defect = std::max(
        rep.max_defect,
        subspace_defect(range, Eigen::MatrixXd::Identity(3, 3).leftCols(rank)));
  }

  // eps on the full linears, coordinates in the constant-tensor basis
  // {(1,0;0,0),(0,1;1,0),(0,0;0,1)}.
  Eigen::MatrixXd eps_full(3, kLinearModes);
  for (int k = 0; k < kLinearModes; ++k) {
    const SymTensor e = linear_mode_strain(k);
    eps_full.col(k) = Eigen::Vector3d(e.xx, e.xy, e.yy);
  }
  {
    int dim = 0;
    const Eigen::MatrixXd kern = null_basis(eps_full, tol, &dim);
    rep.eps_kernel_dim = dim;
    // Rigid motions in linear-mode coordinates: constants and (y,-x).
    Eigen::MatrixXd rigid = Eigen::MatrixXd::Zero(kLinearModes, 3);
    rigid(0, 0) = 1.0;
    rigid(1, 1) = 1.0;
    rigid(3, 2) = 1.0;   // (y,0)
    rigid(4, 2) = -1.0;  // -(0,x)
    rigid.col(2).normalize();
    rep.max_defect = std::max(rep.max_defect, subspace_defect(kern, rigid));
  }

  // div on the reduced tensor modes: range must be the constant vectors.
  {
    int rank = 0;
    const Eigen::MatrixXd range =
        span_basis(div_full.leftCols(kReducedTensorModes), tol, &rank);
    rep.reduced_div_range_dim = rank;
    rep.max_defect = std::max(
        rep.max_defect,
        subspace_defect(range, Eigen::MatrixXd::Identity(3, 2)));
  }

  // eps on the strain-minimal modes: kernel must be the constants.
  {
    Eigen::MatrixXd eps_min(3, kStrainMinimalModes);
    for (int k = 0; k < kStrainMinimalModes; ++k) {
      const SymTensor e = strain_minimal_mode_strain(k);
      eps_min.col(k) = Eigen::Vector3d(e.xx, e.xy, e.yy);
    }
    int dim = 0;
    const Eigen::MatrixXd kern = null_basis(eps_min, tol, &dim);
    rep.minimal_eps_kernel_dim = dim;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(kStrainMinimalModes, 2);
    expected(0, 0) = 1.0;
    expected(1, 1) = 1.0;
    rep.max_defect = std::max(rep.max_defect, subspace_defect(kern, expected));
  }

  return rep;
}

}  // namespace hrks
