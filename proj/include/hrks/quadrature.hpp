#pragma once

#include <stdexcept>
#include <vector>

#include "hrks/mesh.hpp"

namespace hrks {

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights are positive and sum to one; integrals are formed as
/// |T| * sum_i w_i f(p_i).
struct QuadRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Symmetric positive rule exact for bivariate polynomials up to `degree`,
/// 1 <= degree <= 12. Throws std::invalid_argument otherwise.
const QuadRule& quadrature(int degree);

/// Integrates fn over cell t of the mesh.
template <class F>
double integrate(const Mesh& mesh, int t, const QuadRule& rule, F&& fn) {
  const auto& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    s += rule.weights[q] * fn(Vec2(l[0] * a + l[1] * b + l[2] * c));
  }
  return mesh.area(t) * s;
}

}  // namespace hrks
