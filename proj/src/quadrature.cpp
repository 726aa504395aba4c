#include "hrks/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace hrks {

namespace {

void push_orbit3(QuadRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

QuadRule centroid_rule() {
  QuadRule r;
  r.degree = 1;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(1.0);
  return r;
}

QuadRule three_point_rule() {
  QuadRule r;
  r.degree = 2;
  push_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
  return r;
}

QuadRule six_point_rule() {
  QuadRule r;
  r.degree = 4;
  push_orbit3(r, 0.445948490915965, 0.223381589678011);
  push_orbit3(r, 0.091576213509771, 0.109951743655322);
  return r;
}

QuadRule seven_point_rule() {
  QuadRule r;
  r.degree = 5;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.225);
  push_orbit3(r, 0.470142064105115, 0.132394152788506);
  push_orbit3(r, 0.101286507323456, 0.125939180544827);
  return r;
}

// Gauss-Legendre nodes and weights on [0,1] by Newton iteration.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[n - 1 - i] = 0.5 * (t + 1.0);
    w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Collapsed-square (Duffy) rule averaged over the six affine symmetries of
// the reference triangle: positive weights, fully symmetric, exact for the
// requested degree.
QuadRule symmetrized_collapsed_rule(int degree) {
  const int nu = (degree + 3) / 2;  // integrand degree in u is degree+1
  const int nv = (degree + 2) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre_01(nu, xu, wu);
  gauss_legendre_01(nv, xv, wv);

  std::vector<std::array<double, 3>> base;
  std::vector<double> bw;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double x = xu[i];
      const double y = xv[j] * (1.0 - xu[i]);
      base.push_back({1.0 - x - y, x, y});
      bw.push_back(2.0 * wu[i] * wv[j] * (1.0 - xu[i]));  // weights sum to 1
    }

  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  QuadRule r;
  r.degree = degree;
  for (const auto& p : perms)
    for (std::size_t q = 0; q < base.size(); ++q) {
      r.points.push_back({base[q][p[0]], base[q][p[1]], base[q][p[2]]});
      r.weights.push_back(bw[q] / 6.0);
    }
  return r;
}

}  // namespace

const QuadRule& quadrature(int degree) {
  if (degree < 1 || degree > 12)
    throw std::invalid_argument("quadrature: unsupported degree " +
                                std::to_string(degree));
  static std::map<int, QuadRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  QuadRule r;
  switch (degree) {
    case 1: r = centroid_rule(); break;
    case 2: r = three_point_rule(); break;
    case 3: r = six_point_rule(); r.degree = 3; break;
    case 4: r = six_point_rule(); break;
    case 5: r = seven_point_rule(); break;
    default: r = symmetrized_collapsed_rule(degree); break;
  }
  return cache.emplace(degree, std::move(r)).first->second;
}

}  // namespace hrks
