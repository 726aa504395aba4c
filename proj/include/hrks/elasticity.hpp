#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "hrks/geometry.hpp"

namespace hrks {

/// Lame constants; lambda may be arbitrarily large.
struct LameParams {
  double mu = 1.0;
  double lambda = 1.0;
};

/// Compliance: A tau = (1/2mu) (tau - lambda/(2lambda+2mu) tr(tau) Id).
inline SymTensor compliance_apply(const SymTensor& tau, const LameParams& p) {
  const double c = p.lambda / (2.0 * p.lambda + 2.0 * p.mu) * tau.trace();
  return {(tau.xx - c) / (2.0 * p.mu), tau.xy / (2.0 * p.mu),
          (tau.yy - c) / (2.0 * p.mu)};
}

/// Elasticity: C eps = lambda tr(eps) Id + 2mu eps.
inline SymTensor elasticity_apply(const SymTensor& eps, const LameParams& p) {
  const double c = p.lambda * eps.trace();
  return {c + 2.0 * p.mu * eps.xx, 2.0 * p.mu * eps.xy,
          c + 2.0 * p.mu * eps.yy};
}

/// Trace-free part tau - (1/2) tr(tau) Id.
inline SymTensor deviatoric(const SymTensor& tau) {
  const double c = 0.5 * tau.trace();
  return {tau.xx - c, tau.xy, tau.yy - c};
}

/// Manufactured clamped solution on the unit square. The load follows the
/// sign convention div sigma = f (no minus sign).
struct ManufacturedCase {
  std::string id;
  bool load_depends_on_lambda = true;
  bool load_is_h1 = true;

  std::function<Vec2(const Vec2&)> u;
  std::function<Eigen::Matrix2d(const Vec2&)> grad_u;
  // f = div(C eps(u)) in closed form.
  std::function<Vec2(const Vec2&, const LameParams&)> load;

  SymTensor strain(const Vec2& p) const { return sym_part(grad_u(p)); }
  SymTensor stress(const Vec2& p, const LameParams& par) const {
    return elasticity_apply(strain(p), par);
  }
};

/// Known ids: "trig_generic" (u = (sin pi x sin pi y, sin pi x sin pi y))
/// and "divfree_locking" (u = curl (sin pi x sin pi y)^2, so div u = 0 and
/// the load does not depend on lambda).
ManufacturedCase manufactured_case(const std::string& id);

}  // namespace hrks
