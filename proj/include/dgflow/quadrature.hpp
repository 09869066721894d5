#pragma once

#include <array>
#include <vector>

#include "dgflow/mesh.hpp"

namespace dgflow {

/// Quadrature on the reference triangle (points in reference coordinates,
/// weights summing to 1/2) or on the unit interval (weights summing to 1).
struct QuadratureRule {
  std::vector<Vec2> points;    // cell rules; for face rules x() holds the abscissa
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }

  /// Barycentric coordinates (l0, l1, l2) of a cell-rule point.
  std::array<double, 3> barycentric(std::size_t q) const {
    return {1.0 - points[q].x() - points[q].y(), points[q].x(), points[q].y()};
  }
};

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) Gauss rule, exact for polynomials of total degree <= degree.
QuadratureRule cell_quadrature(int degree);

/// Gauss-Legendre rule on [0,1], exact for polynomials of degree <= degree.
QuadratureRule face_quadrature(int degree);

/// Default quadrature degrees used by assembly for scheme order k.
inline int volume_degree(int k) { return 3 * (k + 1); }
inline int face_degree(int k) { return 3 * (k + 1) + 1; }

}  // namespace dgflow
