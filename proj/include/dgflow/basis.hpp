#pragma once

#include <algorithm>

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dgflow/mesh.hpp"

namespace dgflow {

/// Monomials x^a y^b with a + b <= degree, ordered by total degree then by b.
class MonomialSet {
 public:
  explicit MonomialSet(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

  void eval(const Vec2& x, std::span<double> values) const;
  void eval_gradient(const Vec2& x, std::span<Vec2> gradients) const;

 private:
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
};

/// Nodal (Lagrange) basis of P_j on the principal lattice of the reference triangle.
class ScalarBasis {
 public:
  explicit ScalarBasis(int degree);

  int degree() const { return monomials_.degree(); }
  int size() const { return monomials_.size(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  /// values(i, q) and reference gradients for shape function i at points[q].
  void eval(std::span<const Vec2> points, Eigen::MatrixXd& values,
            std::vector<Vec2>* gradients = nullptr) const;

  double value(int i, const Vec2& x) const;
  Vec2 gradient(int i, const Vec2& x) const;

 private:
  MonomialSet monomials_;
  std::vector<Vec2> nodes_;
  Eigen::MatrixXd coefficients_;  // column i holds the monomial coefficients of shape i
};

/// Brezzi-Douglas-Marini space BDM_{k+1} on the reference triangle, built as
/// the dual basis of: shifted-Legendre normal moments on each edge (k+2 per
/// edge, in local edge parameter from vertex (e+1)%3 to (e+2)%3, against the
/// outward normal) followed by interior moments against the Nedelec space of
/// the first kind of degree k.
class BdmBasis {
 public:
  explicit BdmBasis(int k);

  int k() const { return k_; }
  int degree() const { return k_ + 1; }
  int size() const { return static_cast<int>(coefficients_.cols()); }
  int dofs_per_edge() const { return k_ + 2; }
  int interior_dofs() const { return size() - 3 * dofs_per_edge(); }

  Vec2 value(int i, const Vec2& x) const;
  Mat2 gradient(int i, const Vec2& x) const;  // (d v_a / d xi_b)

  /// Dof functional `d` applied to an arbitrary reference vector field. With
  /// `subdivisions` > 1 the moments use composite rules on s edge pieces and
  /// s^2 sub-triangles, for fields that are only piecewise smooth.
  template <class F>
  double apply_dof(int d, F&& field, int subdivisions = 1) const;

  /// Matrix dof_i(shape_j); the identity up to round-off.
  Eigen::MatrixXd dof_matrix() const;

  /// Interior moment weight functions (reference Nedelec basis).
  Vec2 interior_weight(int l, const Vec2& x) const;

  static Vec2 reference_normal(int edge);
  static double reference_edge_length(int edge);
  static Vec2 reference_edge_point(int edge, double t);

 private:
  double dof_of_monomial(int d, int mono) const;

  int k_;
  MonomialSet monomials_;          // degree k+1 scalar monomials
  Eigen::MatrixXd coefficients_;   // rows: (component, monomial), cols: shape functions
};

/// Shifted Legendre polynomial P_n(2t - 1).
double shifted_legendre(int n, double t);

/// Contravariant Piola transform of reference values/gradients to a physical cell.
struct PiolaValues {
  Vec2 value;
  Mat2 gradient;
  double divergence;
};
PiolaValues piola_map(const Vec2& ref_value, const Mat2& ref_gradient, const CellGeometry& geom);

}  // namespace dgflow

#include "dgflow/quadrature.hpp"

namespace dgflow {

template <class F>
double BdmBasis::apply_dof(int d, F&& field, int subdivisions) const {
  const int per_edge = dofs_per_edge();
  const int s = std::max(1, subdivisions);
  if (d < 3 * per_edge) {
    const int edge = d / per_edge;
    const int order = d % per_edge;
    const auto rule = face_quadrature(2 * degree() + 2);
    const Vec2 n = reference_normal(edge);
    double sum = 0.0;
    for (int piece = 0; piece < s; ++piece) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = (piece + rule.points[q].x()) / s;
        sum += rule.weights[q] * field(reference_edge_point(edge, t)).dot(n) * shifted_legendre(order, t);
      }
    }
    return sum * reference_edge_length(edge) / s;
  }
  const int l = d - 3 * per_edge;
  const auto rule = cell_quadrature(2 * degree() + 2);
  double sum = 0.0;
  auto add_triangle = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = a + rule.points[q].x() * (b - a) + rule.points[q].y() * (c - a);
      sum += rule.weights[q] * field(x).dot(interior_weight(l, x));
    }
  };
  const double h = 1.0 / s;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; i + j < s; ++j) {
      const Vec2 o(i * h, j * h);
      add_triangle(o, o + Vec2(h, 0), o + Vec2(0, h));
      if (i + j + 1 < s) add_triangle(o + Vec2(h, 0), o + Vec2(h, h), o + Vec2(0, h));
    }
  }
  return sum / (s * s);
}

}  // namespace dgflow
