#include <random>

#include <gtest/gtest.h>

#include "dgflow/diagnostics.hpp"
#include "dgflow/error.hpp"
#include "dgflow/space.hpp"
#include "oracle.hpp"

using namespace dgflow;

namespace {

Mesh skewed_mesh() {
  // Perturbed interior vertices so cell maps are not all alike.
  Mesh base = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 4, 4);
  std::vector<Vec2> v = base.vertices();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-0.06, 0.06);
  for (auto& x : v) {
    if (x.x() > 1e-12 && x.x() < 1 - 1e-12 && x.y() > 1e-12 && x.y() < 1 - 1e-12) x += Vec2(d(rng), d(rng));
  }
  return Mesh(v, base.cells(), base.boundary_edges(), base.tag_names());
}

// A polynomial vector field of total degree `deg`.
VectorFunction poly_field(int deg) {
  return [deg](const Vec2& x) {
    Vec2 r(0.3, -0.2);
    for (int p = 1; p <= deg; ++p) {
      r += Vec2(std::pow(x.x(), p) - 0.5 * std::pow(x.y(), p), std::pow(x.x() - 0.3 * x.y(), p));
    }
    return r;
  };
}

}  // namespace

class SpaceDegree : public ::testing::TestWithParam<int> {};

TEST_P(SpaceDegree, DofCounts) {
  const int k = GetParam();
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 3, 2);
  const Space V(m, SpaceKind::DgVector, k);
  const Space Q(m, SpaceKind::DgScalar, k);
  EXPECT_EQ(V.dofs_per_cell(), (k + 2) * (k + 3));
  EXPECT_EQ(V.n_dofs(), m.n_cells() * (k + 2) * (k + 3));
  EXPECT_EQ(Q.n_dofs(), m.n_cells() * (k + 1) * (k + 2) / 2);
  EXPECT_TRUE(V.constrained_dofs().empty());
  if (k <= 2) {
    const Space H(m, SpaceKind::Hdiv, k);
    int boundary = 0;
    for (const Face& f : m.faces()) boundary += f.is_boundary();
    EXPECT_EQ(H.n_dofs(), m.n_faces() * (k + 2) + m.n_cells() * k * (k + 2));
    EXPECT_EQ(static_cast<int>(H.constrained_dofs().size()), boundary * (k + 2));
  }
}

TEST_P(SpaceDegree, ProjectionReproducesPolynomials) {
  const int k = GetParam();
  const Mesh m = skewed_mesh();
  const auto f = poly_field(k + 1);
  const Space V(m, SpaceKind::DgVector, k);
  EXPECT_LT(l2_error(project(V, f), f), 1e-12);
  const Space Q(m, SpaceKind::DgScalar, k);
  const ScalarFunction s = [k](const Vec2& x) { return std::pow(x.x() + 2 * x.y(), k) - x.y(); };
  if (k >= 1) EXPECT_LT(l2_error(project(Q, s), s), 1e-12);
  if (k <= 2) {
    const Space H(m, SpaceKind::Hdiv, k);
    EXPECT_LT(l2_error(project(H, f, false), f), 1e-12);
  }
}

TEST_P(SpaceDegree, HdivNormalComponentIsContinuous) {
  const int k = GetParam();
  if (k > 2) GTEST_SKIP();
  const Mesh m = skewed_mesh();
  const Space H(m, SpaceKind::Hdiv, k);
  std::mt19937_64 rng(5 + k);
  const Field u = oracle::random_field(H, rng, true);
  double worst = 0.0, boundary = 0.0, scale = 0.0;
  oracle::for_face_points(H, [&](const Face& f, const Vec2& x, double) {
    const Vec2 up = oracle::trace(u, f.owner, x).v;
    scale = std::max(scale, up.norm());
    if (f.is_boundary()) {
      boundary = std::max(boundary, std::abs(up.dot(f.normal)));
      return;
    }
    const Vec2 um = oracle::trace(u, f.neighbor, x).v;
    worst = std::max(worst, std::abs((up - um).dot(f.normal)));
  });
  EXPECT_GT(scale, 0.1);
  EXPECT_LT(worst, 1e-12 * scale);
  EXPECT_LT(boundary, 1e-12 * scale);
}

TEST_P(SpaceDegree, DgTangentialJumpIsGenericallyNonzero) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 2, 2);
  const Space V(m, SpaceKind::DgVector, GetParam());
  std::mt19937_64 rng(9);
  const Field u = oracle::random_field(V, rng);
  double jump = 0.0;
  oracle::for_face_points(V, [&](const Face& f, const Vec2& x, double) {
    if (!f.is_boundary()) jump = std::max(jump, (oracle::trace(u, f.owner, x).v - oracle::trace(u, f.neighbor, x).v).norm());
  });
  EXPECT_GT(jump, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(K, SpaceDegree, ::testing::Values(0, 1, 2, 3));

TEST(Space, HdivDivergenceMatchesFiniteDifference) {
  const Mesh m = skewed_mesh();
  const Space H(m, SpaceKind::Hdiv, 1);
  std::mt19937_64 rng(2);
  const Field u = oracle::random_field(H, rng);
  const double h = 1e-6;
  for (int c : {0, 7, 20}) {
    const Vec2 xi(0.25, 0.3);
    const auto& g = m.geometry(c);
    const Vec2 x = g.map(xi);
    const Mat2 G = evaluate_gradient(u, c, xi);
    for (int dir = 0; dir < 2; ++dir) {
      Vec2 e = Vec2::Zero();
      e[dir] = h;
      const Vec2 fd = (evaluate_vector(u, c, oracle::to_reference(m, c, x + e)) -
                       evaluate_vector(u, c, oracle::to_reference(m, c, x - e))) / (2 * h);
      EXPECT_NEAR((fd - G.col(dir)).norm(), 0.0, 1e-6);
    }
  }
}

TEST(Space, InvalidDegreesAreRejected) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 1, 1);
  EXPECT_THROW(Space(m, SpaceKind::DgVector, -1), Error);
  EXPECT_THROW(Space(m, SpaceKind::DgVector, 4), Error);
  EXPECT_THROW(Space(m, SpaceKind::Hdiv, 3), Error);
}

TEST(Space, ScalarMeanValue) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(2, 1), 3, 3);
  const Space Q(m, SpaceKind::DgScalar, 1);
  EXPECT_NEAR(mean_value(project(Q, [](const Vec2& x) { return 3.0 + x.x(); })), 4.0, 1e-13);
}

TEST(Space, EvaluationErrors) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 1, 1);
  const Space V(m, SpaceKind::DgVector, 0);
  const Space Q(m, SpaceKind::DgScalar, 0);
  Field u(V), p(Q);
  EXPECT_THROW(evaluate_vector(u, 5, Vec2(0.2, 0.2)), Error);
  EXPECT_THROW(evaluate_scalar(u, 0, Vec2(0.2, 0.2)), Error);
  EXPECT_THROW(project(Q, VectorFunction([](const Vec2&) { return Vec2(1, 0); })), Error);
  EXPECT_THROW(mean_value(u), Error);
  EXPECT_THROW(evaluate_vector(Field(), 0, Vec2(0.2, 0.2)), Error);
}

TEST(ShapeEvaluator, FacePointsAgreeFromBothSides) {
  const Mesh m = skewed_mesh();
  for (SpaceKind kind : {SpaceKind::DgVector, SpaceKind::Hdiv}) {
    const Space V(m, kind, 1);
    const ShapeEvaluator ev(V, volume_degree(1), face_degree(1));
    std::mt19937_64 rng(4);
    const Field u = oracle::random_field(V, rng);
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int f = 0; f < m.n_faces(); ++f) {
      const Face& face = m.faces()[f];
      ev.face_points(f, x, w);
      double wsum = 0.0;
      for (double wi : w) wsum += wi;
      EXPECT_NEAR(wsum, face.diameter, 1e-14);
      VectorShapes s;
      ev.face(face.owner, face.owner_edge, s);
      const auto dofs = V.cell_dofs(face.owner);
      for (int q = 0; q < s.nq; ++q) {
        Vec2 val = Vec2::Zero();
        for (int i = 0; i < s.n; ++i) val += u.coeffs[dofs[i]] * s.v(q, i);
        EXPECT_NEAR((val - oracle::trace(u, face.owner, x[q]).v).norm(), 0.0, 1e-12);
      }
    }
  }
}

TEST(Space, CompositeInterpolationAgreesOnPolynomialsAndHelpsKinks) {
  const Mesh m = generate_rectangle(Vec2(-0.5, -0.5), Vec2(0.5, 0.5), 6, 6);
  const Space H(m, SpaceKind::Hdiv, 1);
  const auto poly = [](const Vec2& x) { return Vec2(x.x() * x.y() + 1.0, x.y() * x.y() - x.x()); };
  EXPECT_LT((project(H, poly, false, 1).coeffs - project(H, poly, false, 5).coeffs).norm(), 1e-12);
  // Solenoidal with a kink on the circle r = 0.3.
  const auto kink = [](const Vec2& x) {
    const double r = x.norm();
    const double s = r < 0.3 ? 1.0 : std::max(0.0, 0.6 - r) / 0.3;
    return Vec2(-x.y() * s, x.x() * s);
  };
  EXPECT_LT(divergence_norm(project(H, kink, false, 8)), 0.1 * divergence_norm(project(H, kink, false, 1)));
}
