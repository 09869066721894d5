#include "dgflow/basis.hpp"

#include <cmath>

#include "dgflow/error.hpp"

namespace dgflow {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

MonomialSet::MonomialSet(int degree) : degree_(degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= total; ++b) exponents_.push_back({total - b, b});
  }
}

void MonomialSet::eval(const Vec2& x, std::span<double> values) const {
  for (int m = 0; m < size(); ++m) {
    values[m] = ipow(x.x(), exponents_[m][0]) * ipow(x.y(), exponents_[m][1]);
  }
}

void MonomialSet::eval_gradient(const Vec2& x, std::span<Vec2> gradients) const {
  for (int m = 0; m < size(); ++m) {
    const auto [a, b] = exponents_[m];
    const double dx = a == 0 ? 0.0 : a * ipow(x.x(), a - 1) * ipow(x.y(), b);
    const double dy = b == 0 ? 0.0 : b * ipow(x.x(), a) * ipow(x.y(), b - 1);
    gradients[m] = Vec2(dx, dy);
  }
}

ScalarBasis::ScalarBasis(int degree) : monomials_(degree) {
  if (degree == 0) {
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  } else {
    // Vertices first (so P1 shapes are the barycentric coordinates), then the rest.
    nodes_ = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    for (int j = 0; j <= degree; ++j) {
      for (int i = 0; i + j <= degree; ++i) {
        const bool vertex = (i == 0 && j == 0) || (i == degree && j == 0) ||
                            (i == 0 && j == degree);
        if (!vertex) nodes_.emplace_back(double(i) / degree, double(j) / degree);
      }
    }
  }
  const int n = monomials_.size();
  Eigen::MatrixXd vandermonde(n, n);
  std::vector<double> row(n);
  for (int p = 0; p < n; ++p) {
    monomials_.eval(nodes_[p], row);
    for (int m = 0; m < n; ++m) vandermonde(p, m) = row[m];
  }
  // shape_i(node_p) = sum_m V(p, m) C(m, i) = delta_pi
  coefficients_ = vandermonde.fullPivLu().inverse();
}

void ScalarBasis::eval(std::span<const Vec2> points, Eigen::MatrixXd& values,
                       std::vector<Vec2>* gradients) const {
  const int n = size();
  const int np = static_cast<int>(points.size());
  values.resize(n, np);
  if (gradients) gradients->assign(static_cast<std::size_t>(n) * np, Vec2::Zero());
  std::vector<double> mv(n);
  std::vector<Vec2> mg(n);
  for (int q = 0; q < np; ++q) {
    monomials_.eval(points[q], mv);
    if (gradients) monomials_.eval_gradient(points[q], mg);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      Vec2 g = Vec2::Zero();
      for (int m = 0; m < n; ++m) {
        v += coefficients_(m, i) * mv[m];
        if (gradients) g += coefficients_(m, i) * mg[m];
      }
      values(i, q) = v;
      if (gradients) (*gradients)[static_cast<std::size_t>(q) * n + i] = g;
    }
  }
}

double ScalarBasis::value(int i, const Vec2& x) const {
  std::vector<double> mv(size());
  monomials_.eval(x, mv);
  double v = 0.0;
  for (int m = 0; m < size(); ++m) v += coefficients_(m, i) * mv[m];
  return v;
}

Vec2 ScalarBasis::gradient(int i, const Vec2& x) const {
  std::vector<Vec2> mg(size());
  monomials_.eval_gradient(x, mg);
  Vec2 g = Vec2::Zero();
  for (int m = 0; m < size(); ++m) g += coefficients_(m, i) * mg[m];
  return g;
}

double shifted_legendre(int n, double t) {
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

namespace {

const Vec2 kRefVertices[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};

}  // namespace

Vec2 BdmBasis::reference_edge_point(int edge, double t) {
  const Vec2& a = kRefVertices[(edge + 1) % 3];
  const Vec2& b = kRefVertices[(edge + 2) % 3];
  return a + t * (b - a);
}

Vec2 BdmBasis::reference_normal(int edge) {
  const Vec2 d = kRefVertices[(edge + 2) % 3] - kRefVertices[(edge + 1) % 3];
  return Vec2(d.y(), -d.x()) / d.norm();
}

double BdmBasis::reference_edge_length(int edge) {
  return (kRefVertices[(edge + 2) % 3] - kRefVertices[(edge + 1) % 3]).norm();
}

BdmBasis::BdmBasis(int k) : k_(k), monomials_(k + 1) {
  if (k < 0 || k > 2) {
    throw Error(ErrorCode::InvalidArgument,
                "BDM basis supports k in {0,1,2}, got " + std::to_string(k));
  }
  const int nm = monomials_.size();
  const int n = 2 * nm;
  Eigen::MatrixXd dofs(n, n);
  for (int d = 0; d < n; ++d) {
    for (int p = 0; p < n; ++p) dofs(d, p) = dof_of_monomial(d, p);
  }
  coefficients_ = dofs.fullPivLu().inverse();
}

double BdmBasis::dof_of_monomial(int d, int p) const {
  const int nm = monomials_.size();
  const int component = p / nm;
  const auto [a, b] = monomials_.exponents()[p % nm];
  auto field = [&](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    v[component] = ipow(x.x(), a) * ipow(x.y(), b);
    return v;
  };
  return apply_dof(d, field);
}

Vec2 BdmBasis::interior_weight(int l, const Vec2& x) const {
  // [P_{k-1}]^2 followed by homogeneous P_{k-1} times (-y, x).
  const MonomialSet low(k_ - 1 >= 0 ? k_ - 1 : 0);
  const int nlow = k_ >= 1 ? low.size() : 0;
  if (l < 2 * nlow) {
    const auto [a, b] = low.exponents()[l % nlow];
    Vec2 v = Vec2::Zero();
    v[l / nlow] = ipow(x.x(), a) * ipow(x.y(), b);
    return v;
  }
  const int h = l - 2 * nlow;  // x^(k-1-h) y^h
  const double s = ipow(x.x(), k_ - 1 - h) * ipow(x.y(), h);
  return Vec2(-x.y() * s, x.x() * s);
}

Vec2 BdmBasis::value(int i, const Vec2& x) const {
  const int nm = monomials_.size();
  std::vector<double> mv(nm);
  monomials_.eval(x, mv);
  Vec2 v = Vec2::Zero();
  for (int m = 0; m < nm; ++m) {
    v.x() += coefficients_(m, i) * mv[m];
    v.y() += coefficients_(nm + m, i) * mv[m];
  }
  return v;
}

Mat2 BdmBasis::gradient(int i, const Vec2& x) const {
  const int nm = monomials_.size();
  std::vector<Vec2> mg(nm);
  monomials_.eval_gradient(x, mg);
  Mat2 g = Mat2::Zero();
  for (int m = 0; m < nm; ++m) {
    g.row(0) += coefficients_(m, i) * mg[m].transpose();
    g.row(1) += coefficients_(nm + m, i) * mg[m].transpose();
  }
  return g;
}

Eigen::MatrixXd BdmBasis::dof_matrix() const {
  const int n = size();
  Eigen::MatrixXd m(n, n);
  for (int d = 0; d < n; ++d) {
    for (int j = 0; j < n; ++j) {
      m(d, j) = apply_dof(d, [&](const Vec2& x) { return value(j, x); });
    }
  }
  return m;
}

PiolaValues piola_map(const Vec2& ref_value, const Mat2& ref_gradient, const CellGeometry& geom) {
  if (!(geom.det > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry,
                "Piola map requires a positively oriented, nondegenerate cell");
  }
  const double inv_det = 1.0 / geom.det;
  PiolaValues out;
  out.value = inv_det * (geom.jacobian * ref_value);
  out.gradient = inv_det * (geom.jacobian * ref_gradient * geom.inverse_jacobian);
  out.divergence = inv_det * ref_gradient.trace();
  return out;
}

}  // namespace dgflow
