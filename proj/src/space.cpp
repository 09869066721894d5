#include "dgflow/space.hpp"

#include <Eigen/Dense>

#include "dgflow/error.hpp"

namespace dgflow {

Space::Space(const Mesh& mesh, SpaceKind kind, int k) : mesh_(&mesh), kind_(kind), k_(k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "space degree k must be >= 0");
  const int nc = mesh.n_cells();
  switch (kind) {
    case SpaceKind::DgVector: {
      if (k > 3) throw Error(ErrorCode::InvalidArgument, "DG velocity spaces support k <= 3");
      scalar_ = std::make_shared<ScalarBasis>(k + 1);
      dofs_per_cell_ = 2 * scalar_->size();
      break;
    }
    case SpaceKind::DgScalar: {
      if (k > 3) throw Error(ErrorCode::InvalidArgument, "DG pressure spaces support k <= 3");
      scalar_ = std::make_shared<ScalarBasis>(k);
      dofs_per_cell_ = scalar_->size();
      break;
    }
    case SpaceKind::Hdiv: {
      bdm_ = std::make_shared<BdmBasis>(k);
      dofs_per_cell_ = bdm_->size();
      break;
    }
  }
  dofs_.resize(static_cast<std::size_t>(nc) * dofs_per_cell_);
  signs_.assign(dofs_.size(), 1.0);
  if (kind != SpaceKind::Hdiv) {
    for (std::size_t i = 0; i < dofs_.size(); ++i) dofs_[i] = static_cast<int>(i);
    n_dofs_ = nc * dofs_per_cell_;
    return;
  }

  const int per_edge = bdm_->dofs_per_edge();
  const int interior = bdm_->interior_dofs();
  const int face_dofs = mesh.n_faces() * per_edge;
  n_dofs_ = face_dofs + nc * interior;
  for (int c = 0; c < nc; ++c) {
    int* d = dofs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_;
    double* s = signs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_;
    for (int e = 0; e < 3; ++e) {
      const int f = mesh.cell_face(c, e);
      const Face& face = mesh.faces()[f];
      const double orient = face.owner == c ? 1.0 : -1.0;
      const bool reversed = mesh.local_edge_vertices(c, e)[0] != face.vertices[0];
      for (int i = 0; i < per_edge; ++i) {
        d[e * per_edge + i] = f * per_edge + i;
        s[e * per_edge + i] = orient * ((reversed && i % 2 == 1) ? -1.0 : 1.0);
      }
    }
    for (int l = 0; l < interior; ++l) d[3 * per_edge + l] = face_dofs + c * interior + l;
  }
  constraint_mask_.assign(n_dofs_, 0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!mesh.faces()[f].is_boundary()) continue;
    for (int i = 0; i < per_edge; ++i) {
      constrained_.push_back(f * per_edge + i);
      constraint_mask_[f * per_edge + i] = 1;
    }
  }
}

ShapeEvaluator::ShapeEvaluator(const Space& space, int cell_degree, int face_degree)
    : space_(&space),
      cell_rule_(cell_quadrature(cell_degree)),
      face_rule_(face_quadrature(face_degree)) {
  cell_table_ = make_table(cell_rule_.points);
  for (int e = 0; e < 3; ++e) {
    for (int r = 0; r < 2; ++r) {
      std::vector<Vec2> pts;
      for (std::size_t q = 0; q < face_rule_.size(); ++q) {
        const double t = face_rule_.points[q].x();
        pts.push_back(BdmBasis::reference_edge_point(e, r ? 1.0 - t : t));
      }
      face_tables_[e][r] = make_table(std::move(pts));
    }
  }
}

ShapeEvaluator::Table ShapeEvaluator::make_table(std::vector<Vec2> points) const {
  Table t;
  t.points = std::move(points);
  const int nq = static_cast<int>(t.points.size());
  if (space_->kind() == SpaceKind::Hdiv) {
    const BdmBasis& b = space_->bdm_basis();
    t.vval.resize(static_cast<std::size_t>(nq) * b.size());
    t.vgrad.resize(t.vval.size());
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < b.size(); ++i) {
        t.vval[q * b.size() + i] = b.value(i, t.points[q]);
        t.vgrad[q * b.size() + i] = b.gradient(i, t.points[q]);
      }
    }
  } else {
    const ScalarBasis& b = space_->scalar_basis();
    Eigen::MatrixXd values;
    b.eval(t.points, values, &t.sgrad);
    t.sval.resize(static_cast<std::size_t>(nq) * b.size());
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < b.size(); ++i) t.sval[q * b.size() + i] = values(i, q);
    }
  }
  return t;
}

void ShapeEvaluator::map_vector(const Table& t, int cell, VectorShapes& out) const {
  if (!space_->is_vector()) {
    throw Error(ErrorCode::InvalidArgument, "vector shapes requested from a scalar space");
  }
  const CellGeometry& geom = space_->mesh().geometry(cell);
  const int nq = static_cast<int>(t.points.size());
  const int n = space_->dofs_per_cell();
  out.n = n;
  out.nq = nq;
  out.value.resize(static_cast<std::size_t>(n) * nq);
  out.grad.resize(out.value.size());
  out.div.resize(out.value.size());
  if (space_->kind() == SpaceKind::Hdiv) {
    const auto signs = space_->cell_signs(cell);
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < n; ++i) {
        const PiolaValues p = piola_map(t.vval[q * n + i], t.vgrad[q * n + i], geom);
        out.value[q * n + i] = signs[i] * p.value;
        out.grad[q * n + i] = signs[i] * p.gradient;
        out.div[q * n + i] = signs[i] * p.divergence;
      }
    }
    return;
  }
  const int m = n / 2;
  const Mat2 jit = geom.inverse_jacobian.transpose();
  for (int q = 0; q < nq; ++q) {
    for (int j = 0; j < m; ++j) {
      const double phi = t.sval[q * m + j];
      const Vec2 g = jit * t.sgrad[q * m + j];
      const int i0 = q * n + j;
      const int i1 = q * n + m + j;
      out.value[i0] = Vec2(phi, 0.0);
      out.value[i1] = Vec2(0.0, phi);
      Mat2 g0 = Mat2::Zero();
      g0.row(0) = g.transpose();
      Mat2 g1 = Mat2::Zero();
      g1.row(1) = g.transpose();
      out.grad[i0] = g0;
      out.grad[i1] = g1;
      out.div[i0] = g.x();
      out.div[i1] = g.y();
    }
  }
}

void ShapeEvaluator::map_scalar(const Table& t, int cell, ScalarShapes& out) const {
  if (space_->is_vector()) {
    throw Error(ErrorCode::InvalidArgument, "scalar shapes requested from a vector space");
  }
  const Mat2 jit = space_->mesh().geometry(cell).inverse_jacobian.transpose();
  const int nq = static_cast<int>(t.points.size());
  const int n = space_->dofs_per_cell();
  out.n = n;
  out.nq = nq;
  out.value.assign(t.sval.begin(), t.sval.end());
  out.grad.resize(t.sgrad.size());
  for (std::size_t i = 0; i < t.sgrad.size(); ++i) out.grad[i] = jit * t.sgrad[i];
}

const ShapeEvaluator::Table& ShapeEvaluator::face_table(int cell, int local_edge) const {
  const Mesh& mesh = space_->mesh();
  const Face& face = mesh.faces()[mesh.cell_face(cell, local_edge)];
  const bool reversed = mesh.local_edge_vertices(cell, local_edge)[0] != face.vertices[0];
  return face_tables_[local_edge][reversed ? 1 : 0];
}

void ShapeEvaluator::cell(int cell, VectorShapes& out) const { map_vector(cell_table_, cell, out); }
void ShapeEvaluator::cell(int cell, ScalarShapes& out) const { map_scalar(cell_table_, cell, out); }

void ShapeEvaluator::face(int cell, int local_edge, VectorShapes& out) const {
  map_vector(face_table(cell, local_edge), cell, out);
}

void ShapeEvaluator::face(int cell, int local_edge, ScalarShapes& out) const {
  map_scalar(face_table(cell, local_edge), cell, out);
}

void ShapeEvaluator::cell_points(int cell, std::vector<Vec2>& x, std::vector<double>& w) const {
  const CellGeometry& geom = space_->mesh().geometry(cell);
  x.resize(cell_rule_.size());
  w.resize(cell_rule_.size());
  for (std::size_t q = 0; q < cell_rule_.size(); ++q) {
    x[q] = geom.map(cell_rule_.points[q]);
    w[q] = cell_rule_.weights[q] * geom.det;
  }
}

void ShapeEvaluator::face_points(int face, std::vector<Vec2>& x, std::vector<double>& w) const {
  const Mesh& mesh = space_->mesh();
  const Face& f = mesh.faces()[face];
  const Vec2& a = mesh.vertices()[f.vertices[0]];
  const Vec2& b = mesh.vertices()[f.vertices[1]];
  x.resize(face_rule_.size());
  w.resize(face_rule_.size());
  for (std::size_t q = 0; q < face_rule_.size(); ++q) {
    const double t = face_rule_.points[q].x();
    x[q] = a + t * (b - a);
    w[q] = face_rule_.weights[q] * f.diameter;
  }
}

namespace {

void check_cell(const Field& field, int cell) {
  if (!field.space) throw Error(ErrorCode::InvalidArgument, "field is not bound to a space");
  if (cell < 0 || cell >= field.space->mesh().n_cells()) {
    throw Error(ErrorCode::InvalidArgument, "cell index " + std::to_string(cell) + " out of range");
  }
}

// Shapes of one cell at a single reference point.
VectorShapes point_shapes(const Space& space, int cell, const Vec2& ref) {
  VectorShapes s;
  const int n = space.dofs_per_cell();
  s.n = n;
  s.nq = 1;
  s.value.resize(n);
  s.grad.resize(n);
  s.div.resize(n);
  const CellGeometry& geom = space.mesh().geometry(cell);
  if (space.kind() == SpaceKind::Hdiv) {
    const auto signs = space.cell_signs(cell);
    for (int i = 0; i < n; ++i) {
      const PiolaValues p =
          piola_map(space.bdm_basis().value(i, ref), space.bdm_basis().gradient(i, ref), geom);
      s.value[i] = signs[i] * p.value;
      s.grad[i] = signs[i] * p.gradient;
      s.div[i] = signs[i] * p.divergence;
    }
    return s;
  }
  const int m = n / 2;
  const ScalarBasis& b = space.scalar_basis();
  for (int j = 0; j < m; ++j) {
    const double phi = b.value(j, ref);
    const Vec2 g = geom.inverse_jacobian.transpose() * b.gradient(j, ref);
    s.value[j] = Vec2(phi, 0.0);
    s.value[m + j] = Vec2(0.0, phi);
    s.grad[j] = Mat2::Zero();
    s.grad[j].row(0) = g.transpose();
    s.grad[m + j] = Mat2::Zero();
    s.grad[m + j].row(1) = g.transpose();
    s.div[j] = g.x();
    s.div[m + j] = g.y();
  }
  return s;
}

}  // namespace

Vec2 evaluate_vector(const Field& field, int cell, const Vec2& ref_point) {
  check_cell(field, cell);
  const VectorShapes s = point_shapes(*field.space, cell, ref_point);
  const auto dofs = field.space->cell_dofs(cell);
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < s.n; ++i) v += field.coeffs[dofs[i]] * s.value[i];
  return v;
}

Mat2 evaluate_gradient(const Field& field, int cell, const Vec2& ref_point) {
  check_cell(field, cell);
  const VectorShapes s = point_shapes(*field.space, cell, ref_point);
  const auto dofs = field.space->cell_dofs(cell);
  Mat2 g = Mat2::Zero();
  for (int i = 0; i < s.n; ++i) g += field.coeffs[dofs[i]] * s.grad[i];
  return g;
}

double evaluate_scalar(const Field& field, int cell, const Vec2& ref_point) {
  check_cell(field, cell);
  if (field.space->is_vector()) {
    throw Error(ErrorCode::InvalidArgument, "evaluate_scalar on a vector space");
  }
  const ScalarBasis& b = field.space->scalar_basis();
  const auto dofs = field.space->cell_dofs(cell);
  double v = 0.0;
  for (int i = 0; i < b.size(); ++i) v += field.coeffs[dofs[i]] * b.value(i, ref_point);
  return v;
}

namespace {

int projection_degree(const Space& space) { return 2 * space.degree() + 6; }

// Reference mass matrix of the scalar basis, with its Cholesky factor.
Eigen::LLT<Eigen::MatrixXd> reference_mass(const ScalarBasis& b, const QuadratureRule& rule,
                                           Eigen::MatrixXd& values) {
  b.eval(rule.points, values);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    m += rule.weights[q] * values.col(q) * values.col(q).transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "singular reference mass matrix");
  }
  return llt;
}

}  // namespace

Field project(const Space& space, const VectorFunction& f, bool constrain, int subdivisions) {
  if (!space.is_vector()) throw Error(ErrorCode::InvalidArgument, "vector projection on a scalar space");
  Field out(space);
  const Mesh& mesh = space.mesh();
  if (space.kind() == SpaceKind::DgVector) {
    const QuadratureRule rule = cell_quadrature(projection_degree(space));
    Eigen::MatrixXd values;
    const auto llt = reference_mass(space.scalar_basis(), rule, values);
    const int m = space.scalar_basis().size();
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const CellGeometry& geom = mesh.geometry(c);
      Eigen::VectorXd r0 = Eigen::VectorXd::Zero(m), r1 = Eigen::VectorXd::Zero(m);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 fv = f(geom.map(rule.points[q]));
        r0 += rule.weights[q] * fv.x() * values.col(q);
        r1 += rule.weights[q] * fv.y() * values.col(q);
      }
      const auto dofs = space.cell_dofs(c);
      const Eigen::VectorXd c0 = llt.solve(r0), c1 = llt.solve(r1);
      for (int j = 0; j < m; ++j) {
        out.coeffs[dofs[j]] = c0[j];
        out.coeffs[dofs[m + j]] = c1[j];
      }
    }
    return out;
  }
  const BdmBasis& b = space.bdm_basis();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry& geom = mesh.geometry(c);
    const Mat2 pull = geom.det * geom.inverse_jacobian;
    auto ref_field = [&](const Vec2& xi) -> Vec2 { return pull * f(geom.map(xi)); };
    const auto dofs = space.cell_dofs(c);
    const auto signs = space.cell_signs(c);
    for (int d = 0; d < b.size(); ++d) out.coeffs[dofs[d]] = signs[d] * b.apply_dof(d, ref_field, subdivisions);
  }
  if (constrain) {
    for (int d : space.constrained_dofs()) out.coeffs[d] = 0.0;
  }
  return out;
}

Field project(const Space& space, const ScalarFunction& f) {
  if (space.is_vector()) throw Error(ErrorCode::InvalidArgument, "scalar projection on a vector space");
  Field out(space);
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = cell_quadrature(projection_degree(space));
  Eigen::MatrixXd values;
  const auto llt = reference_mass(space.scalar_basis(), rule, values);
  const int m = space.scalar_basis().size();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry& geom = mesh.geometry(c);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      r += rule.weights[q] * f(geom.map(rule.points[q])) * values.col(q);
    }
    const Eigen::VectorXd coef = llt.solve(r);
    const auto dofs = space.cell_dofs(c);
    for (int j = 0; j < m; ++j) out.coeffs[dofs[j]] = coef[j];
  }
  return out;
}

double mean_value(const Field& field) {
  const Space& space = *field.space;
  if (space.is_vector()) throw Error(ErrorCode::InvalidArgument, "mean_value needs a scalar field");
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = cell_quadrature(space.degree());
  Eigen::MatrixXd values;
  space.scalar_basis().eval(rule.points, values);
  double sum = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto dofs = space.cell_dofs(c);
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double v = 0.0;
      for (int j = 0; j < values.rows(); ++j) v += field.coeffs[dofs[j]] * values(j, q);
      cell_sum += rule.weights[q] * v;
    }
    sum += cell_sum * mesh.geometry(c).det;
  }
  return sum / mesh.area();
}

}  // namespace dgflow
