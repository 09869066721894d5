#include "dgflow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dgflow/error.hpp"

namespace dgflow {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule cell_quadrature(int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "quadrature degree must be >= 0");
  // xi1 = s, xi2 = t (1 - s); the Jacobian (1 - s) raises the s-degree by one.
  const int ns = (degree + 2) / 2 + ((degree + 2) % 2);
  const int nt = (degree + 1) / 2 + ((degree + 1) % 2);
  std::vector<double> xs, ws, xt, wt;
  gauss_legendre(ns, xs, ws);
  gauss_legendre(nt, xt, wt);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      rule.points.emplace_back(xs[i], xt[j] * (1.0 - xs[i]));
      rule.weights.push_back(ws[i] * wt[j] * (1.0 - xs[i]));
    }
  }
  return rule;
}

QuadratureRule face_quadrature(int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "quadrature degree must be >= 0");
  const int n = (degree + 1) / 2 + ((degree + 1) % 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(x[i], 0.0);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace dgflow
