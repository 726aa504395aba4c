#include "hrks/schemes.hpp"

#include <cmath>

#include "hrks/parallel.hpp"

namespace hrks {

namespace {

constexpr int kErrorQuadDegree = 10;

struct StressNorms {
  double l2 = 0.0;
  double div_l2 = 0.0;
};

StressNorms stress_norms(const Mesh& mesh,
                         const std::vector<Eigen::Matrix<double, 6, 1>>& modes) {
  const QuadRule& rule = quadrature(4);
  StressNorms n;
  for (int t = 0; t < mesh.nt(); ++t) {
    const Vec2 c = mesh.centroid(t);
    n.l2 += integrate(mesh, t, rule, [&](const Vec2& p) {
      return evaluate_stress_modes(modes[t], p, c).squared_norm();
    });
    n.div_l2 += integrate(mesh, t, rule, [&](const Vec2& p) {
      return evaluate_stress_modes_div(modes[t], p, c).squaredNorm();
    });
  }
  n.l2 = std::sqrt(n.l2);
  n.div_l2 = std::sqrt(n.div_l2);
  return n;
}

double trace_integral(const Mesh& mesh,
                      const std::vector<Eigen::Matrix<double, 6, 1>>& modes) {
  double s = 0.0;
  for (int t = 0; t < mesh.nt(); ++t)
    s += mesh.area(t) * (modes[t](0) + modes[t](2));
  return s;
}

double rigid_field_norm(const Mesh& mesh,
                        const std::vector<Eigen::Vector3d>& coeffs) {
  const QuadRule& rule = quadrature(4);
  double s = 0.0;
  for (int t = 0; t < mesh.nt(); ++t)
    s += integrate(mesh, t, rule, [&](const Vec2& p) {
      return rigid_field_value(mesh, coeffs, t, p).squaredNorm();
    });
  return std::sqrt(s);
}

std::vector<Eigen::Matrix<double, 6, 1>> stress_modes_from_coeffs(
    const StressSpace& ss, int nt, const Eigen::VectorXd& coeffs) {
  std::vector<Eigen::Matrix<double, 6, 1>> m(nt);
  for (int t = 0; t < nt; ++t) m[t] = ss.cell_modes(t, coeffs);
  return m;
}

Eigen::Matrix<double, 6, 1> constant_tensor_modes(const SymTensor& s) {
  Eigen::Matrix<double, 6, 1> m = Eigen::Matrix<double, 6, 1>::Zero();
  m(0) = s.xx;
  m(1) = s.xy;
  m(2) = s.yy;
  return m;
}

SymTensor cell_mean_stress(const Mesh& mesh, int t,
                           const Eigen::Matrix<double, 6, 1>& modes) {
  // Modes 3 and 4 have zero mean in centroid coordinates; the quadratic mode
  // does not.
  const QuadRule& rule = quadrature(4);
  const Vec2 c = mesh.centroid(t);
  const double q_mean = integrate(mesh, t, rule, [&](const Vec2& p) {
                          return tensor_mode(5, p, c).xy;
                        }) / mesh.area(t);
  SymTensor s{modes(0), modes(1), modes(2)};
  s.xy += modes(5) * q_mean;
  return s;
}

void check_hr_trace(const Mesh& mesh, DiscreteSolution& sol) {
  const StressNorms n = stress_norms(mesh, sol.sigma_modes);
  const double tr = trace_integral(mesh, sol.sigma_modes);
  sol.checks.trace_integral = tr;
  if (n.l2 == 0.0) {
    sol.checks.trace_rel = 0.0;
    return;
  }
  sol.checks.trace_rel = std::abs(tr) / n.l2;
  if (*sol.checks.trace_rel > 1e-9)
    throw SchemeError(sol.scheme + ": trace integral " + std::to_string(tr) +
                      " exceeds tolerance relative to ||sigma||");
}

}  // namespace

Discretization Discretization::build(Mesh mesh, bool use_threads) {
  Discretization d;
  d.mesh = std::move(mesh);
  d.ks = build_ks_space(d.mesh);
  d.stress = build_stress_space(d.mesh, d.ks, use_threads);
  return d;
}

std::vector<Eigen::Vector3d> project_load_rigid(const Mesh& mesh,
                                                const LoadFn& f,
                                                const QuadRule& rule) {
  std::vector<Eigen::Vector3d> out(mesh.nt());
  for (int t = 0; t < mesh.nt(); ++t)
    out[t] = project_rigid(mesh, t, rule, f);
  return out;
}

Vec2 rigid_field_value(const Mesh& mesh,
                       const std::vector<Eigen::Vector3d>& coeffs, int cell,
                       const Vec2& p) {
  const Vec2 c = mesh.centroid(cell);
  Vec2 v(0.0, 0.0);
  for (int k = 0; k < 3; ++k) v += coeffs[cell](k) * rigid_mode(k, p, c);
  return v;
}

DiscreteSolution solve_hr(const Discretization& d, const LameParams& params,
                          const LoadFn& f) {
  const Mesh& mesh = d.mesh;
  const SparseMatrix a = assemble_A(mesh, d.stress, params);
  const SparseMatrix b = assemble_B_rigid(mesh, d.stress);
  const Eigen::VectorXd load =
      assemble_load_rigid(mesh, cellwise(f), quadrature(kErrorQuadDegree));

  BlockBuilder bb({d.stress.dim(), 3 * mesh.nt()});
  bb.add_block(0, 0, a);
  bb.add_block(0, 1, b, /*transposed=*/true);
  bb.add_block(1, 0, b);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(bb.total());
  rhs.tail(3 * mesh.nt()) = load;

  SolveReport rep;
  const Eigen::VectorXd x = solve_sparse(bb.assemble(), rhs, &rep);

  DiscreteSolution sol;
  sol.scheme = "hr";
  sol.params = params;
  sol.u_kind = DiscreteSolution::UKind::rigid;
  sol.stress_coeffs = x.head(d.stress.dim());
  sol.displacement = x.tail(3 * mesh.nt());
  sol.sigma_modes = stress_modes_from_coeffs(d.stress, mesh.nt(), sol.stress_coeffs);
  sol.u_loc.assign(mesh.nt(), Eigen::Matrix<double, 6, 1>::Zero());
  for (int t = 0; t < mesh.nt(); ++t)
    sol.u_loc[t].head<3>() = sol.displacement.segment<3>(3 * t);
  sol.checks.solver_residual = rep.rel_residual;

  check_hr_trace(mesh, sol);
  {
    const StressNorms n = stress_norms(mesh, sol.sigma_modes);
    std::vector<Eigen::Vector3d> u(mesh.nt());
    for (int t = 0; t < mesh.nt(); ++t) u[t] = sol.displacement.segment<3>(3 * t);
    const double fn = rigid_field_norm(
        mesh, project_load_rigid(mesh, f, quadrature(kErrorQuadDegree)));
    if (fn > 0.0)
      sol.checks.stability_ratio =
          (std::hypot(n.l2, n.div_l2) + rigid_field_norm(mesh, u)) / fn;
  }
  return sol;
}

DiscreteSolution solve_ks_primal(const Discretization& d,
                                 const LameParams& params, const LoadFn& f) {
  const Mesh& mesh = d.mesh;
  const SparseMatrix k = assemble_ks_stiffness(mesh, d.ks, params);
  const Eigen::VectorXd load = assemble_ks_load(
      mesh, d.ks, cellwise(f), quadrature(kErrorQuadDegree));
  SolveReport rep;
  const Eigen::VectorXd u = solve_spd(k, load, &rep);

  DiscreteSolution sol;
  sol.scheme = "ks";
  sol.params = params;
  sol.u_kind = DiscreteSolution::UKind::ks;
  sol.displacement = u;
  sol.sigma_modes.resize(mesh.nt());
  sol.u_loc.assign(mesh.nt(), Eigen::Matrix<double, 6, 1>::Zero());
  for (int t = 0; t < mesh.nt(); ++t) {
    for (int s = 0; s < 6; ++s) {
      const int dof = d.ks.cell_dofs[t][s];
      if (dof >= 0) sol.u_loc[t](s) = u(dof);
    }
    sol.sigma_modes[t] = constant_tensor_modes(
        elasticity_apply(d.ks.strain(mesh, t, u), params));
  }
  sol.checks.solver_residual = rep.rel_residual;
  return sol;
}

DiscreteSolution solve_hr_min(const Discretization& d, const LameParams& params,
                              const LoadFn& f) {
  const Mesh& mesh = d.mesh;
  const SparseMatrix a = assemble_A(mesh, d.stress, params);
  const SparseMatrix b = assemble_B_constant(mesh, d.stress);
  const ConstraintSet cq = build_reduced_constraints(mesh, d.stress);
  const Eigen::VectorXd load =
      assemble_load_constant(mesh, cellwise(f), quadrature(kErrorQuadDegree));

  BlockBuilder bb({d.stress.dim(), 2 * mesh.nt(), mesh.nt()});
  bb.add_block(0, 0, a);
  bb.add_block(0, 1, b, /*transposed=*/true);
  bb.add_block(1, 0, b);
  bb.add_block(0, 2, cq.rows, /*transposed=*/true);
  bb.add_block(2, 0, cq.rows);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(bb.total());
  rhs.segment(d.stress.dim(), 2 * mesh.nt()) = load;

  SolveReport rep;
  const Eigen::VectorXd x = solve_sparse(bb.assemble(), rhs, &rep);

  DiscreteSolution sol;
  sol.scheme = "hr-min";
  sol.params = params;
  sol.u_kind = DiscreteSolution::UKind::cellwise_constant;
  sol.stress_coeffs = x.head(d.stress.dim());
  sol.displacement = x.segment(d.stress.dim(), 2 * mesh.nt());
  sol.sigma_modes = stress_modes_from_coeffs(d.stress, mesh.nt(), sol.stress_coeffs);
  sol.u_loc.assign(mesh.nt(), Eigen::Matrix<double, 6, 1>::Zero());
  for (int t = 0; t < mesh.nt(); ++t)
    sol.u_loc[t].head<2>() = sol.displacement.segment<2>(2 * t);
  sol.checks.solver_residual = rep.rel_residual;

  // The divergence must be cell-wise constant: no net quadratic mode.
  double qmax = 0.0, scale = 0.0;
  for (int t = 0; t < mesh.nt(); ++t) {
    qmax = std::max(qmax, std::abs(sol.sigma_modes[t](5)));
    scale = std::max(scale, sol.sigma_modes[t].cwiseAbs().maxCoeff());
  }
  sol.checks.qmode_rel = scale > 0.0 ? qmax / scale : 0.0;
  if (*sol.checks.qmode_rel > 1e-9)
    throw SchemeError("hr-min: quadratic stress mode not eliminated, rel " +
                      std::to_string(*sol.checks.qmode_rel));
  sol.checks.trace_integral = trace_integral(mesh, sol.sigma_modes);
  const StressNorms n = stress_norms(mesh, sol.sigma_modes);
  if (n.l2 > 0.0)
    sol.checks.trace_rel = std::abs(*sol.checks.trace_integral) / n.l2;
  return sol;
}

DiscreteSolution solve_nl_min(const Discretization& d, const LameParams& params,
                              const LoadFn& f, int dense_guard) {
  const Mesh& mesh = d.mesh;
  const SparseMatrix a = assemble_A(mesh, d.stress, params, /*projected=*/true);
  const SparseMatrix b = assemble_B_constant(mesh, d.stress);
  const ConstraintSet cq = build_reduced_constraints(mesh, d.stress);
  const Eigen::VectorXd load =
      assemble_load_constant(mesh, cellwise(f), quadrature(kErrorQuadDegree));

  BlockBuilder bb({d.stress.dim(), 2 * mesh.nt(), mesh.nt()});
  bb.add_block(0, 0, a);
  bb.add_block(0, 1, b, /*transposed=*/true);
  bb.add_block(1, 0, b);
  bb.add_block(0, 2, cq.rows, /*transposed=*/true);
  bb.add_block(2, 0, cq.rows);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(bb.total());
  rhs.segment(d.stress.dim(), 2 * mesh.nt()) = load;

  SolveReport rep;
  const Eigen::VectorXd x = solve_sparse(bb.assemble(), rhs, &rep);
  const Eigen::VectorXd aux_stress = x.head(d.stress.dim());
  const Eigen::VectorXd aux_u = x.segment(d.stress.dim(), 2 * mesh.nt());

  DiscreteSolution sol;
  sol.scheme = "nl-min";
  sol.params = params;
  sol.u_kind = DiscreteSolution::UKind::strain_minimal;
  sol.checks.solver_residual = rep.rel_residual;
  sol.sigma_modes.resize(mesh.nt());
  sol.u_loc.assign(mesh.nt(), Eigen::Matrix<double, 6, 1>::Zero());
  sol.displacement.resize(5 * mesh.nt());

  const auto aux_modes = stress_modes_from_coeffs(d.stress, mesh.nt(), aux_stress);
  for (int t = 0; t < mesh.nt(); ++t) {
    // C eps_h(u) = P0 sigma_aux and P0 u = u_aux determine the cell values.
    const SymTensor mean = cell_mean_stress(mesh, t, aux_modes[t]);
    const SymTensor eps = compliance_apply(mean, params);
    Eigen::Matrix<double, 6, 1> loc = Eigen::Matrix<double, 6, 1>::Zero();
    loc(0) = aux_u(2 * t);
    loc(1) = aux_u(2 * t + 1);
    loc(2) = eps.xx;
    loc(3) = eps.xy;
    loc(4) = eps.yy;
    sol.u_loc[t] = loc;
    sol.displacement.segment<5>(5 * t) = loc.head<5>();
    sol.sigma_modes[t] = constant_tensor_modes(mean);
  }

  if (5 * mesh.nt() <= dense_guard) {
    const ConstraintSet cv = build_vrks_constraints(mesh, d.stress, cq);
    const Eigen::MatrixXd z = constraint_nullspace(cv);
    const SparseMatrix k = assemble_strain_minimal_stiffness(mesh, params);
    const Eigen::VectorXd bm = assemble_strain_minimal_load(
        mesh, cellwise(f), quadrature(kErrorQuadDegree),
        RhsProjector::cellwise_constant);
    const Eigen::VectorXd r = k.multiply(sol.displacement) - bm;
    double resid = 0.0;
    for (int j = 0; j < z.cols(); ++j)
      resid = std::max(resid, std::abs(z.col(j).dot(r)) / z.col(j).norm());
    sol.checks.equation_residual = resid;
    if (resid > 1e-8 * std::max(1.0, bm.norm()))
      throw SchemeError("nl-min: Galerkin residual " + std::to_string(resid));
  }
  return sol;
}

TransferResult transfer_primal_to_mixed(
    const Discretization& d, const LameParams& params,
    const std::vector<Eigen::Vector3d>& f_rigid) {
  const Mesh& mesh = d.mesh;
  const QuadRule& rule = quadrature(4);
  const CellLoadFn fh = [&](int cell, const Vec2& p) {
    return rigid_field_value(mesh, f_rigid, cell, p);
  };

  const SparseMatrix k = assemble_ks_stiffness(mesh, d.ks, params);
  const Eigen::VectorXd load = assemble_ks_load(mesh, d.ks, fh, rule);
  const Eigen::VectorXd r = solve_spd(k, load);

  TransferResult out;
  out.primal = r;
  out.zeta_modes.resize(mesh.nt());
  out.rbar.resize(mesh.nt());

  double div_abs = 0.0, div_scale = 0.0, mean_abs = 0.0, mean_scale = 0.0;
  for (int t = 0; t < mesh.nt(); ++t) {
    const SymTensor sig_r =
        elasticity_apply(d.ks.strain(mesh, t, r), params);
    // Right-hand side of the cell recovery against the six local tests.
    Eigen::Matrix<double, 6, 1> rhs;
    for (int s = 0; s < 6; ++s) {
      const SymTensor eps = local_test_strain(mesh, t, s);
      rhs(s) = integrate(mesh, t, rule, [&](const Vec2& p) {
        return fh(t, p).dot(local_test(mesh, t, s, p));
      }) - mesh.area(t) * sig_r.contract(eps);
    }
    const Eigen::Matrix<double, 6, 1> zeta = d.stress.duals[t].dual * rhs;
    out.zeta_modes[t] = zeta;

    // div zeta in rigid coordinates is (w4, w3, -2 w5).
    const Eigen::Vector3d div_coeffs(zeta(4), zeta(3), -2.0 * zeta(5));
    div_abs = std::max(div_abs, (div_coeffs - f_rigid[t]).cwiseAbs().maxCoeff());
    div_scale = std::max(div_scale, f_rigid[t].cwiseAbs().maxCoeff());

    // The cell mean of the recovered stress is the negative of C eps_h(r).
    const SymTensor mean = cell_mean_stress(mesh, t, zeta);
    const SymTensor sum = mean + sig_r;
    mean_abs = std::max({mean_abs, std::abs(sum.xx), std::abs(sum.xy),
                         std::abs(sum.yy)});
    mean_scale = std::max({mean_scale, std::abs(sig_r.xx), std::abs(sig_r.xy),
                           std::abs(sig_r.yy)});

    out.rbar[t] = project_rigid(mesh, t, rule, [&](const Vec2& p) {
      return d.ks.evaluate(mesh, t, p, r);
    });
  }
  out.div_residual = div_scale > 0.0 ? div_abs / div_scale : div_abs;
  out.mean_residual = mean_scale > 0.0 ? mean_abs / mean_scale : mean_abs;
  if (out.div_residual > 1e-9)
    throw SchemeError("transfer: div zeta != f_h, rel " +
                      std::to_string(out.div_residual));
  if (out.mean_residual > 1e-9)
    throw SchemeError("transfer: P0 zeta + C eps_h(r) != 0, rel " +
                      std::to_string(out.mean_residual));
  return out;
}

ProjectedMixedSolution solve_projected_mixed(
    const Discretization& d, const LameParams& params,
    const std::vector<Eigen::Vector3d>& f_rigid) {
  const Mesh& mesh = d.mesh;
  const SparseMatrix a = assemble_A(mesh, d.stress, params, /*projected=*/true);
  const SparseMatrix b = assemble_B_rigid(mesh, d.stress);
  const Eigen::VectorXd load = rigid_load_vector(mesh, f_rigid);

  BlockBuilder bb({d.stress.dim(), 3 * mesh.nt()});
  bb.add_block(0, 0, a);
  bb.add_block(0, 1, b, /*transposed=*/true);
  bb.add_block(1, 0, b);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(bb.total());
  rhs.tail(3 * mesh.nt()) = load;

  SolveReport rep;
  const Eigen::VectorXd x = solve_sparse(bb.assemble(), rhs, &rep);
  ProjectedMixedSolution out;
  out.stress = x.head(d.stress.dim());
  out.multiplier = -x.tail(3 * mesh.nt());  // the form carries -(rbar, div eta)
  out.solver_residual = rep.rel_residual;
  return out;
}

FieldValues evaluate_in_cell(const Mesh& mesh, const DiscreteSolution& sol,
                             int cell, const Vec2& p) {
  const Vec2 c = mesh.centroid(cell);
  FieldValues v;
  v.sigma = evaluate_stress_modes(sol.sigma_modes[cell], p, c);
  v.div_sigma = evaluate_stress_modes_div(sol.sigma_modes[cell], p, c);

  const auto& loc = sol.u_loc[cell];
  switch (sol.u_kind) {
    case DiscreteSolution::UKind::rigid: {
      v.u = Vec2(0, 0);
      for (int k = 0; k < 3; ++k) v.u += loc(k) * rigid_mode(k, p, c);
      v.eps_u = SymTensor{};
      break;
    }
    case DiscreteSolution::UKind::cellwise_constant: {
      v.u = Vec2(loc(0), loc(1));
      v.eps_u = SymTensor{};
      break;
    }
    case DiscreteSolution::UKind::ks: {
      v.u = Vec2(0, 0);
      v.eps_u = SymTensor{};
      for (int s = 0; s < 6; ++s) {
        if (loc(s) == 0.0) continue;
        v.u += loc(s) * local_test(mesh, cell, s, p);
        v.eps_u += loc(s) * local_test_strain(mesh, cell, s);
      }
      break;
    }
    case DiscreteSolution::UKind::strain_minimal: {
      v.u = Vec2(0, 0);
      v.eps_u = SymTensor{};
      for (int k = 0; k < kStrainMinimalModes; ++k) {
        v.u += loc(k) * strain_minimal_mode(k, p, c);
        v.eps_u += loc(k) * strain_minimal_mode_strain(k);
      }
      break;
    }
  }
  return v;
}

FieldValues evaluate(const Mesh& mesh, const DiscreteSolution& sol,
                     const Vec2& point) {
  const int cell = mesh.locate(point);
  if (cell < 0)
    throw SchemeError("evaluation point outside the mesh");
  return evaluate_in_cell(mesh, sol, cell, point);
}

}  // namespace hrks
