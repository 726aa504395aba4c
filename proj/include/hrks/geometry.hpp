#pragma once

#include <Eigen/Dense>

namespace hrks {

using Vec2 = Eigen::Vector2d;

/// Symmetric 2x2 tensor, stored as (xx, xy, yy).
struct SymTensor {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  static SymTensor identity() { return {1.0, 0.0, 1.0}; }

  double trace() const { return xx + yy; }

  // Frobenius contraction; the off-diagonal entry counts twice.
  double contract(const SymTensor& o) const {
    return xx * o.xx + 2.0 * xy * o.xy + yy * o.yy;
  }
  double squared_norm() const { return contract(*this); }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << xx, xy, xy, yy;
    return m;
  }
  static SymTensor from_matrix(const Eigen::Matrix2d& m) {
    return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
  }

  SymTensor& operator+=(const SymTensor& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    xx -= o.xx;
    xy -= o.xy;
    yy -= o.yy;
    return *this;
  }
  SymTensor& operator*=(double s) {
    xx *= s;
    xy *= s;
    yy *= s;
    return *this;
  }
};

inline SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
inline SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
inline SymTensor operator*(double s, SymTensor a) { return a *= s; }

/// Symmetric gradient of a vector field given its Jacobian.
inline SymTensor sym_part(const Eigen::Matrix2d& grad) {
  return SymTensor::from_matrix(0.5 * (grad + grad.transpose()));
}

}  // namespace hrks
