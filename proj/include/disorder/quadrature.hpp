#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "disorder/errors.hpp"

namespace disorder {

// Gauss-Legendre rule on [-1,1]. Nodes and weights are computed by Newton
// iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule make_gauss_rule(int n) {
  if (n < 1) throw domain_error("make_gauss_rule: order must be positive");
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = -z;
    rule.x[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[static_cast<std::size_t>(n - 1 - i)] =
        rule.w[static_cast<std::size_t>(i)];
  }
  return rule;
}

inline const GaussRule& gauss_rule(int n) {
  constexpr int kMaxOrder = 16;
  if (n < 1 || n > kMaxOrder)
    throw domain_error("gauss_rule: order out of range");
  static const auto cache = [] {
    std::array<GaussRule, kMaxOrder + 1> rules;
    for (int k = 1; k <= kMaxOrder; ++k)
      rules[static_cast<std::size_t>(k)] = make_gauss_rule(k);
    return rules;
  }();
  return cache[static_cast<std::size_t>(n)];
}

// Integral of f over [a,b] with a single application of the given rule.
template <class F>
double integrate_cell(F&& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    acc += rule.w[i] * f(mid + half * rule.x[i]);
  return acc * half;
}

// Integration mesh on [0,1]: the tabulation knots, the preimages under the
// jump map of the knots (so that w(S(y)) is linear within every cell), and
// geometric refinement toward both endpoints with ratio 1/2 down to cells
// of width min_width. The endpoint integrands behave like y^(m1-2) and
// (1-y)^(m1-2); both are integrable but steep, and the graded cells keep
// the per-cell Gauss error uniformly small.
inline std::vector<double> build_integration_mesh(
    const std::vector<double>& knots, double p, double min_width) {
  std::vector<double> mesh(knots.begin(), knots.end());
  if (p < 1.0) {
    for (double q : knots) {
      const double y = (q - p) / (1.0 - p);
      if (y > min_width && y < 1.0 - min_width) mesh.push_back(y);
    }
  }
  const double lo = knots[1];
  for (double v = min_width; v < lo; v *= 2.0) mesh.push_back(v);
  const double hi = 1.0 - knots[knots.size() - 2];
  for (double v = min_width; v < hi; v *= 2.0) mesh.push_back(1.0 - v);
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  return mesh;
}

}  // namespace disorder
