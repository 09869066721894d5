#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dgflow/analytic.hpp"
#include "dgflow/diagnostics.hpp"
#include "dgflow/linear_solver.hpp"
#include "dgflow/solver.hpp"
#include "oracle.hpp"

using namespace dgflow;

namespace {

FormParams rotational(ConvectiveVariant v, double theta, double nu) {
  FormParams p;
  p.variant = v;
  p.theta = theta;
  p.zeta = 1.0;
  p.zeta_boundary = std::max(1.0, 0.5 * std::abs(1 - theta));
  p.gamma = 1000.0;
  p.nu = nu;
  return p;
}

SparseMatrix tridiagonal(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -2.0);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

TEST(LinearSolver, SolvesAndReusesAnalysis) {
  LinearSolver s;
  const SparseMatrix A = tridiagonal(50);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, -1.0, 2.0);
  const Eigen::VectorXd b = A * x;
  EXPECT_LT((s.solve(A, b) - x).norm(), 1e-12);
  EXPECT_LT(s.last_relative_residual(), 1e-12);
  EXPECT_EQ(s.analyses(), 1);
  const SparseMatrix A2 = 2.0 * A;
  EXPECT_LT((s.solve(A2, A2 * x) - x).norm(), 1e-12);
  EXPECT_EQ(s.analyses(), 1);
  s.factorize(A);
  EXPECT_LT((s.solve_factored(b) - x).norm(), 1e-12);
}

TEST(LinearSolver, IdentityReturnsRightHandSide) {
  LinearSolver s;
  SparseMatrix I(5, 5);
  I.setIdentity();
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(5, 3.0);
  EXPECT_EQ(s.solve(I, b), b);
}

TEST(LinearSolver, SingularMatrixFails) {
  LinearSolver s;
  SparseMatrix A(3, 3);
  A.insert(0, 0) = 1.0;
  A.insert(1, 1) = 1.0;
  try {
    s.solve(A, Eigen::VectorXd::Ones(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LinearSolveFailed);
  }
  EXPECT_THROW(s.solve(SparseMatrix(2, 3), Eigen::VectorXd::Ones(2)), Error);
}

TEST(Newton, ConvergesQuadraticallyOnScalarProblem) {
  LinearSolver lin;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 3.0);
  const auto r = newton_solve(
      [](const Eigen::VectorXd& v) { return Eigen::VectorXd::Constant(1, v[0] * v[0] - 2.0); },
      [](const Eigen::VectorXd& v) {
        SparseMatrix J(1, 1);
        J.insert(0, 0) = 2.0 * v[0];
        return J;
      },
      x, {1e-14, 1e-14, 20}, lin);
  EXPECT_NEAR(x[0], std::sqrt(2.0), 1e-13);
  EXPECT_LE(r.iterations, 7);
  EXPECT_EQ(r.history.size(), static_cast<std::size_t>(r.iterations + 1));
}

TEST(Newton, DivergenceCarriesHistory) {
  LinearSolver lin;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
  // x^2 + 1 has no real root.
  try {
    newton_solve([](const Eigen::VectorXd& v) { return Eigen::VectorXd::Constant(1, v[0] * v[0] + 1.0); },
                 [](const Eigen::VectorXd& v) {
                   SparseMatrix J(1, 1);
                   J.insert(0, 0) = 2.0 * v[0] + 1e-3;
                   return J;
                 },
                 x, {1e-12, 1e-12, 5}, lin);
    FAIL();
  } catch (const NewtonDiverged& e) {
    EXPECT_EQ(e.code(), ErrorCode::NewtonDiverged);
    EXPECT_EQ(e.history().size(), 6u);
  }
  EXPECT_THROW(newton_solve({}, {}, x, {0.0, 1e-8, 5}, lin), Error);
}

TEST(FlowSolver, DofCountIncludesMultiplier) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(2 * M_PI, 2 * M_PI), 10, 10);
  const Space V(m, SpaceKind::DgVector, 0);
  const Space Q(m, SpaceKind::DgScalar, 0);
  FlowSolver s(V, Q, rotational(ConvectiveVariant::C2, 0.0, 0.0));
  EXPECT_EQ(s.n_total(), 1401);
}

TEST(FlowSolver, MismatchedDegreesRejected) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 2, 2);
  const Space V(m, SpaceKind::DgVector, 1);
  const Space Q(m, SpaceKind::DgScalar, 0);
  EXPECT_THROW(FlowSolver(V, Q, rotational(ConvectiveVariant::C2, 0.0, 0.0)), Error);
}

class Manufactured : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(Manufactured, StationarySolutionIsExact) {
  const auto [k, theta] = GetParam();
  const AnalyticSolution s = manufactured(k, 1.0, theta);
  const Mesh m = generate_rectangle(s.lo, s.hi, 3, 3);
  const Space V(m, SpaceKind::DgVector, k);
  const Space Q(m, SpaceKind::DgScalar, k);
  FlowSolver solver(V, Q, rotational(ConvectiveVariant::C2, theta, 1.0));
  const SolveState st = solver.solve_stationary({s.forcing, s.boundary}, NewtonConfig::stationary());
  EXPECT_LT(l2_error(st.u, [&](const Vec2& x) { return s.velocity(0.0, x); }), 1e-9);
  EXPECT_LT(std::abs(mean_value(st.p)), 1e-12);
  Field P = project(Q, [&](const Vec2& x) { return manufactured_P(k, x); });
  P.coeffs.array() -= mean_value(P);
  EXPECT_LT((st.p.coeffs - P.coeffs).cwiseAbs().maxCoeff(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Thetas, Manufactured,
                         ::testing::Combine(::testing::Values(0, 1), ::testing::Values(-1.0, 0.0, 1.0)));

TEST(FlowSolver, NewtonConvergesQuadraticallyOnKovasznay) {
  const AnalyticSolution s = kovasznay(0.025);
  const Mesh m = generate_rectangle(s.lo, s.hi, 6, 6);
  const Space V(m, SpaceKind::DgVector, 1);
  const Space Q(m, SpaceKind::DgScalar, 1);
  FlowSolver solver(V, Q, rotational(ConvectiveVariant::C2, 1.0, 0.025));
  const SolveState st = solver.solve_stationary({s.forcing, s.boundary}, NewtonConfig::stationary());
  const auto& h = st.newton.history;
  ASSERT_GE(h.size(), 3u);
  EXPECT_LT(h.back(), 1e-10 * std::max(1.0, h.front()));
  EXPECT_LE(st.newton.iterations, 12);
}

TEST(FlowSolver, StationaryNeedsViscosity) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 2, 2);
  const Space V(m, SpaceKind::DgVector, 0);
  const Space Q(m, SpaceKind::DgScalar, 0);
  FlowSolver solver(V, Q, rotational(ConvectiveVariant::C2, 1.0, 0.0));
  EXPECT_THROW(solver.solve_stationary({}, NewtonConfig::stationary()), Error);
}

TEST(FlowSolver, CrankNicolsonStepKeepsSolenoidalHdivField) {
  const AnalyticSolution g = gresho();
  const Mesh m = generate_rectangle(g.lo, g.hi, 8, 8);
  const Space V(m, SpaceKind::Hdiv, 1);
  const Space Q(m, SpaceKind::DgScalar, 1);
  FormParams p = rotational(ConvectiveVariant::C2, 1.0, 0.0);
  p.zeta = 0.0;
  p.zeta_boundary = 0.0;
  p.gamma = 0.0;
  FlowSolver solver(V, Q, p);
  const Field u0 = project(V, [&](const Vec2& x) { return g.velocity(0.0, x); });
  // Interpolation of the non-polynomial vortex leaves a divergence defect.
  EXPECT_GT(divergence_norm(u0), 1e-3);
  SolveState st = solver.initial_state(solver.solenoidal_projection(u0));
  EXPECT_LT(divergence_norm(st.u), 1e-10);
  EXPECT_LT(l2_error(st.u, [&](const Vec2& x) { return g.velocity(0.0, x); }), 2 * l2_error(u0, [&](const Vec2& x) { return g.velocity(0.0, x); }));
  const double e0 = kinetic_energy(st.u);
  for (int i = 0; i < 3; ++i) {
    solver.cn_step(st, 0.01, {}, NewtonConfig::tightened());
    EXPECT_LT(divergence_norm(st.u), 1e-10);
  }
  EXPECT_NEAR(st.t, 0.03, 1e-15);
  EXPECT_EQ(st.step, 3);
  EXPECT_LT(std::abs(kinetic_energy(st.u) - e0) / e0, 1e-10);
  EXPECT_LT(std::abs(mean_value(st.p)), 1e-12);
}

TEST(FlowSolver, StepOfRestStateStaysAtRest) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 3, 3);
  const Space V(m, SpaceKind::DgVector, 1);
  const Space Q(m, SpaceKind::DgScalar, 1);
  FlowSolver solver(V, Q, rotational(ConvectiveVariant::C2, 0.0, 0.01));
  SolveState st = solver.initial_state(Field(V));
  solver.cn_step(st, 0.1, {}, NewtonConfig::transient());
  EXPECT_EQ(st.u.coeffs.norm(), 0.0);
  EXPECT_THROW(solver.cn_step(st, 0.0, {}, NewtonConfig::transient()), Error);
}
