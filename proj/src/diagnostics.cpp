#include "dgflow/diagnostics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "dgflow/error.hpp"

namespace dgflow {

namespace {

void require_vector(const Field& u) {
  if (!u.space || !u.space->is_vector()) {
    throw Error(ErrorCode::InvalidArgument, "diagnostic needs a velocity field");
  }
}

// Calls fn(x, w, u, grad u, div u) at every cell quadrature point.
template <class Fn>
void for_points(const Field& u, int degree, Fn&& fn) {
  const Space& V = *u.space;
  const ShapeEvaluator ev(V, degree, 1);
  VectorShapes s;
  std::vector<Vec2> x;
  std::vector<double> w;
  for (int c = 0; c < V.mesh().n_cells(); ++c) {
    ev.cell(c, s);
    ev.cell_points(c, x, w);
    const auto dofs = V.cell_dofs(c);
    for (int q = 0; q < s.nq; ++q) {
      Vec2 v = Vec2::Zero();
      Mat2 g = Mat2::Zero();
      double d = 0.0;
      for (int i = 0; i < s.n; ++i) {
        const double ci = u.coeffs[dofs[i]];
        v += ci * s.v(q, i);
        g += ci * s.g(q, i);
        d += ci * s.d(q, i);
      }
      fn(c, x[q], w[q], v, g, d);
    }
  }
}

}  // namespace

double kinetic_energy(const Field& u) {
  require_vector(u);
  double e = 0.0;
  for_points(u, volume_degree(u.space->k()),
             [&](int, const Vec2&, double w, const Vec2& v, const Mat2&, double) { e += w * v.squaredNorm(); });
  return 0.5 * e;
}

Vec2 linear_momentum(const Field& u) {
  require_vector(u);
  Vec2 m = Vec2::Zero();
  for_points(u, volume_degree(u.space->k()),
             [&](int, const Vec2&, double w, const Vec2& v, const Mat2&, double) { m += w * v; });
  return m;
}

double angular_momentum(const Field& u, const Vec2& origin) {
  require_vector(u);
  double a = 0.0;
  for_points(u, volume_degree(u.space->k()),
             [&](int, const Vec2& x, double w, const Vec2& v, const Mat2&, double) {
               const Vec2 r = x - origin;
               a += w * (r.x() * v.y() - r.y() * v.x());
             });
  return a;
}

double l2_error(const Field& u, const VectorFunction& exact) {
  require_vector(u);
  double e = 0.0;
  for_points(u, volume_degree(u.space->k()) + 2,
             [&](int, const Vec2& x, double w, const Vec2& v, const Mat2&, double) {
               e += w * (v - exact(x)).squaredNorm();
             });
  return std::sqrt(e);
}

double l2_error(const Field& p, const ScalarFunction& exact) {
  if (!p.space || p.space->is_vector()) throw Error(ErrorCode::InvalidArgument, "l2_error needs a scalar field");
  const Space& Q = *p.space;
  const ShapeEvaluator ev(Q, volume_degree(Q.k()) + 2, 1);
  ScalarShapes s;
  std::vector<Vec2> x;
  std::vector<double> w;
  double e = 0.0;
  for (int c = 0; c < Q.mesh().n_cells(); ++c) {
    ev.cell(c, s);
    ev.cell_points(c, x, w);
    const auto dofs = Q.cell_dofs(c);
    for (int q = 0; q < s.nq; ++q) {
      double v = 0.0;
      for (int i = 0; i < s.n; ++i) v += p.coeffs[dofs[i]] * s.v(q, i);
      e += w[q] * std::pow(v - exact(x[q]), 2);
    }
  }
  return std::sqrt(e);
}

double divergence_norm(const Field& u) {
  require_vector(u);
  double e = 0.0;
  for_points(u, volume_degree(u.space->k()),
             [&](int, const Vec2&, double w, const Vec2&, const Mat2&, double d) { e += w * d * d; });
  return std::sqrt(e);
}

namespace {

// Cell-local projection of point data supplied by value_at(cell, ref_point index).
Field project_cellwise(const Space& Q, int degree,
                       const std::function<double(int, const Vec2&, int)>& value_at) {
  const ScalarBasis& b = Q.scalar_basis();
  const QuadratureRule rule = cell_quadrature(degree);
  Eigen::MatrixXd values;
  b.eval(rule.points, values);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (std::size_t q = 0; q < rule.size(); ++q) m += rule.weights[q] * values.col(q) * values.col(q).transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  Field out(Q);
  for (int c = 0; c < Q.mesh().n_cells(); ++c) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(b.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      r += rule.weights[q] * value_at(c, rule.points[q], static_cast<int>(q)) * values.col(q);
    }
    const Eigen::VectorXd coef = llt.solve(r);
    const auto dofs = Q.cell_dofs(c);
    for (int j = 0; j < b.size(); ++j) out.coeffs[dofs[j]] = coef[j];
  }
  return out;
}

}  // namespace

Field vorticity(const Field& u, const Space& scalar_space) {
  require_vector(u);
  if (scalar_space.is_vector() || &scalar_space.mesh() != &u.space->mesh()) {
    throw Error(ErrorCode::InvalidArgument, "vorticity needs a scalar space on the velocity mesh");
  }
  return project_cellwise(scalar_space, 2 * u.space->degree() + 2,
                          [&](int c, const Vec2& xi, int) {
                            const Mat2 g = evaluate_gradient(u, c, xi);
                            return g(1, 0) - g(0, 1);
                          });
}

Field recover_kinematic_pressure(const Field& P, const Field& u, double theta) {
  require_vector(u);
  if (!P.space || P.space->is_vector()) throw Error(ErrorCode::InvalidArgument, "pressure must be scalar");
  if (&P.space->mesh() != &u.space->mesh()) {
    throw Error(ErrorCode::InvalidArgument, "pressure and velocity live on different meshes");
  }
  if (theta == 0.0) return P;
  Field p = project_cellwise(*P.space, 2 * u.space->degree() + P.space->degree() + 2,
                             [&](int c, const Vec2& xi, int) {
                               return evaluate_scalar(P, c, xi) -
                                      0.5 * theta * evaluate_vector(u, c, xi).squaredNorm();
                             });
  const double mean = mean_value(p);
  const Field one = project(*P.space, ScalarFunction([](const Vec2&) { return 1.0; }));
  p.coeffs -= mean * one.coeffs;
  return p;
}

ConservationRecord conservation_record(const Field& u, double t, const Vec2& origin) {
  ConservationRecord r;
  r.t = t;
  r.energy = kinetic_energy(u);
  r.momentum = linear_momentum(u);
  r.angular_momentum = angular_momentum(u, origin);
  return r;
}

}  // namespace dgflow
