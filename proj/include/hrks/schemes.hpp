#pragma once

#include <optional>
#include <string>

#include "hrks/assembly.hpp"
#include "hrks/solver.hpp"

namespace hrks {

struct SchemeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mesh together with the displacement and stress spaces built on it.
struct Discretization {
  Mesh mesh;
  KSSpace ks;
  StressSpace stress;

  static Discretization build(Mesh mesh, bool use_threads = true);
};

struct PostChecks {
  double solver_residual = 0.0;
  // Integral of tr(sigma_h) and its size relative to ||sigma_h||.
  std::optional<double> trace_integral;
  std::optional<double> trace_rel;
  // (||sigma||_div + ||u||) / ||P_R f|| for the mixed solves.
  std::optional<double> stability_ratio;
  // Largest net quadratic-mode coefficient (constrained solves).
  std::optional<double> qmode_rel;
  // Galerkin residual of the minimal displacement scheme against a spanning
  // set of its space (only computed within the dense-solve guard).
  std::optional<double> equation_residual;
};

/// Solution of one of the four schemes, stored cell-locally so that point
/// evaluation and error integration need no global lookups.
struct DiscreteSolution {
  std::string scheme;  // "hr" | "ks" | "hr-min" | "nl-min"
  LameParams params;

  enum class UKind { rigid, cellwise_constant, ks, strain_minimal };
  UKind u_kind = UKind::rigid;

  Eigen::VectorXd stress_coeffs;  // stress-basis coefficients when applicable
  Eigen::VectorXd displacement;   // native dof vector of the scheme

  std::vector<Eigen::Matrix<double, 6, 1>> sigma_modes;  // per cell
  std::vector<Eigen::Matrix<double, 6, 1>> u_loc;        // per cell

  PostChecks checks;

  bool has_stress_field() const {
    return scheme == "hr" || scheme == "hr-min";
  }
};

/// Mixed solve over the stress space and the piecewise rigid displacements.
DiscreteSolution solve_hr(const Discretization& d, const LameParams& params,
                          const LoadFn& f);

/// Primal solve on the displacement space; the cell-wise stress
/// C eps_h(u) is stored alongside.
DiscreteSolution solve_ks_primal(const Discretization& d,
                                 const LameParams& params, const LoadFn& f);

/// Mixed solve over the reduced stress space (divergence cell-wise constant,
/// imposed through multiplier rows) and piecewise constants.
DiscreteSolution solve_hr_min(const Discretization& d, const LameParams& params,
                              const LoadFn& f);

/// Minimal displacement scheme, solved through the projected mixed problem
/// and recovered cell by cell. The Galerkin residual check runs only when
/// 5*nt fits the dense guard (or always if check_equation forces it).
DiscreteSolution solve_nl_min(const Discretization& d, const LameParams& params,
                              const LoadFn& f, int dense_guard = 3000);

/// Rigid L2 projection of a load, cell by cell.
std::vector<Eigen::Vector3d> project_load_rigid(const Mesh& mesh,
                                                const LoadFn& f,
                                                const QuadRule& rule);

/// Evaluation of a piecewise rigid field from its per-cell coefficients.
Vec2 rigid_field_value(const Mesh& mesh,
                       const std::vector<Eigen::Vector3d>& coeffs, int cell,
                       const Vec2& p);

/// Result of the cell-wise primal-to-mixed transfer for a piecewise rigid
/// load: the primal solution, the recovered stress, and the rigid projection
/// of the primal solution (which reproduces the mixed multiplier).
struct TransferResult {
  Eigen::VectorXd primal;                                // KS dofs
  std::vector<Eigen::Matrix<double, 6, 1>> zeta_modes;   // per cell
  std::vector<Eigen::Vector3d> rbar;                     // per cell
  double div_residual = 0.0;    // max rel |div zeta - f_h|
  double mean_residual = 0.0;   // max rel |P0 zeta + C eps_h(r)|
};

TransferResult transfer_primal_to_mixed(
    const Discretization& d, const LameParams& params,
    const std::vector<Eigen::Vector3d>& f_rigid);

/// Direct solve of the projected mixed problem
///   (A P0 zeta, P0 eta) - (rbar, div eta) = 0,  (div zeta, s) = (f_h, s);
/// used as the second route of the equivalence check.
struct ProjectedMixedSolution {
  Eigen::VectorXd stress;      // stress-basis coefficients of zeta
  Eigen::VectorXd multiplier;  // rigid coefficients of rbar (3 per cell)
  double solver_residual = 0.0;
};

ProjectedMixedSolution solve_projected_mixed(
    const Discretization& d, const LameParams& params,
    const std::vector<Eigen::Vector3d>& f_rigid);

enum class Field { u, sigma, div_sigma, eps_u };

struct FieldValues {
  Vec2 u;
  SymTensor sigma;
  Vec2 div_sigma;
  SymTensor eps_u;
};

/// Exact polynomial evaluation of the discrete fields at a point inside the
/// domain; throws if the point lies outside every cell.
FieldValues evaluate(const Mesh& mesh, const DiscreteSolution& sol,
                     const Vec2& point);
FieldValues evaluate_in_cell(const Mesh& mesh, const DiscreteSolution& sol,
                             int cell, const Vec2& point);

}  // namespace hrks
