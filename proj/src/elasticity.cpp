#include "hrks/elasticity.hpp"

#include <cmath>

namespace hrks {

namespace {

constexpr double kPi = 3.14159265358979323846;

ManufacturedCase trig_generic() {
  ManufacturedCase c;
  c.id = "trig_generic";
  c.load_depends_on_lambda = true;
  c.load_is_h1 = true;
  c.u = [](const Vec2& p) {
    const double v = std::sin(kPi * p.x()) * std::sin(kPi * p.y());
    return Vec2(v, v);
  };
  c.grad_u = [](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    Eigen::Matrix2d g;
    g << kPi * cx * sy, kPi * sx * cy, kPi * cx * sy, kPi * sx * cy;
    return g;
  };
  c.load = [](const Vec2& p, const LameParams& par) {
    const double sx = std::sin(kPi * p.x()), cx = std::cos(kPi * p.x());
    const double sy = std::sin(kPi * p.y()), cy = std::cos(kPi * p.y());
    const double pi2 = kPi * kPi;
    const double v = (par.lambda + par.mu) * pi2 * (cx * cy - sx * sy) -
                     2.0 * par.mu * pi2 * sx * sy;
    return Vec2(v, v);
  };
  return c;
}

// u = curl phi with phi = (sin pi x sin pi y)^2. Divergence-free, so the
// stress 2 mu eps(u) and the load mu Laplace(u) are independent of lambda.
ManufacturedCase divfree_locking() {
  ManufacturedCase c;
  c.id = "divfree_locking";
  c.load_depends_on_lambda = false;
  c.load_is_h1 = true;
  c.u = [](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
    const double s2x = std::sin(2.0 * kPi * p.x());
    const double s2y = std::sin(2.0 * kPi * p.y());
    return Vec2(kPi * sx * sx * s2y, -kPi * s2x * sy * sy);
  };
  c.grad_u = [](const Vec2& p) {
    const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y());
    const double s2x = std::sin(2.0 * kPi * p.x());
    const double s2y = std::sin(2.0 * kPi * p.y());
    const double c2x = std::cos(2.0 * kPi * p.x());
    const double c2y = std::cos(2.0 * kPi * p.y());
    const double pi2 = kPi * kPi;
    Eigen::Matrix2d g;
    g(0, 0) = pi2 * s2x * s2y;
    g(0, 1) = 2.0 * pi2 * sx * sx * c2y;
    g(1, 0) = -2.0 * pi2 * c2x * sy * sy;
    g(1, 1) = -pi2 * s2x * s2y;
    return g;
  };
  c.load = [](const Vec2& p, const LameParams& par) {
    const double s2x = std::sin(2.0 * kPi * p.x());
    const double s2y = std::sin(2.0 * kPi * p.y());
    const double c2x = std::cos(2.0 * kPi * p.x());
    const double c2y = std::cos(2.0 * kPi * p.y());
    const double pi3 = kPi * kPi * kPi;
    return Vec2(2.0 * par.mu * pi3 * s2y * (2.0 * c2x - 1.0),
                -2.0 * par.mu * pi3 * s2x * (2.0 * c2y - 1.0));
  };
  return c;
}

}  // namespace

ManufacturedCase manufactured_case(const std::string& id) {
  if (id == "trig_generic") return trig_generic();
  if (id == "divfree_locking") return divfree_locking();
  throw std::invalid_argument("unknown manufactured case: " + id);
}

}  // namespace hrks
