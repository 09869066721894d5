#include "dgflow/forms.hpp"

#include <cmath>

#include "dgflow/error.hpp"
#include "parallel.hpp"

namespace dgflow {

using detail::Scatter;
using detail::Triplets;

std::string to_string(ConvectiveVariant v) {
  switch (v) {
    case ConvectiveVariant::C0: return "C0";
    case ConvectiveVariant::C1: return "C1";
    case ConvectiveVariant::C2: return "C2";
    case ConvectiveVariant::CTilde: return "CTILDE";
  }
  return "?";
}

ConvectiveVariant parse_variant(const std::string& s) {
  if (s == "C0") return ConvectiveVariant::C0;
  if (s == "C1") return ConvectiveVariant::C1;
  if (s == "C2") return ConvectiveVariant::C2;
  if (s == "CTILDE" || s == "Ctilde") return ConvectiveVariant::CTilde;
  throw Error(ErrorCode::InvalidConfig, "unknown convective variant '" + s + "'");
}

std::string to_string(ViscousTensor t) {
  switch (t) {
    case ViscousTensor::Grad: return "grad";
    case ViscousTensor::SymGrad: return "symgrad";
    case ViscousTensor::Deviatoric: return "deviatoric";
  }
  return "?";
}

ViscousTensor parse_tensor(const std::string& s) {
  if (s == "grad") return ViscousTensor::Grad;
  if (s == "symgrad") return ViscousTensor::SymGrad;
  if (s == "deviatoric") return ViscousTensor::Deviatoric;
  throw Error(ErrorCode::InvalidConfig, "unknown viscous tensor '" + s + "'");
}

void check_params(const FormParams& p, const Space& velocity) { check_params(p, velocity.kind()); }

void check_params(const FormParams& p, SpaceKind velocity_kind) {
  if (p.gamma < 0.0 || p.nu < 0.0 || p.zeta < 0.0 || p.eta == 0.0) {
    throw Error(ErrorCode::InvalidConfig, "gamma, nu, zeta must be >= 0 and eta > 0");
  }
  const bool rotational =
      p.variant == ConvectiveVariant::C1 || p.variant == ConvectiveVariant::C2;
  if (rotational && velocity_kind == SpaceKind::DgVector && !p.allow_unstable) {
    const double floor = 0.5 * std::abs(1.0 - p.theta);
    if (p.boundary_zeta() < floor - 1e-14) {
      throw Error(ErrorCode::InvalidConfig,
                  "boundary upwind weight " + std::to_string(p.boundary_zeta()) +
                      " is below 0.5|1-theta| = " + std::to_string(floor) +
                      "; raise zeta_boundary or set allow_unstable");
    }
  }
}

FormAssembler::FormAssembler(const Space& velocity, const Space* pressure, FormParams params)
    : V_(&velocity),
      Q_(pressure),
      params_(params),
      ev_(velocity, volume_degree(velocity.k()), face_degree(velocity.k())) {
  if (!velocity.is_vector()) throw Error(ErrorCode::InvalidArgument, "velocity space must be vector valued");
  if (pressure) {
    if (&pressure->mesh() != &velocity.mesh()) {
      throw Error(ErrorCode::InvalidArgument, "velocity and pressure spaces live on different meshes");
    }
    if (pressure->is_vector()) throw Error(ErrorCode::InvalidArgument, "pressure space must be scalar");
    evq_ = std::make_unique<ShapeEvaluator>(*pressure, volume_degree(velocity.k()),
                                            face_degree(velocity.k()));
  }
}

namespace {

SparseMatrix build(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Mat2 apply_tensor(ViscousTensor t, const Mat2& g) {
  switch (t) {
    case ViscousTensor::Grad: return g;
    case ViscousTensor::SymGrad: return g + g.transpose();
    case ViscousTensor::Deviatoric:
      return g + g.transpose() - (2.0 / 3.0) * g.trace() * Mat2::Identity();
  }
  return g;
}

struct FaceSide {
  int cell;
  int edge;
  double sigma;  // +1 on K+, -1 on K-
};

std::vector<FaceSide> sides_of(const Face& f) {
  std::vector<FaceSide> s{{f.owner, f.owner_edge, 1.0}};
  if (!f.is_boundary()) s.push_back({f.neighbor, f.neighbor_edge, -1.0});
  return s;
}

}  // namespace

SparseMatrix FormAssembler::mass() const {
  const Mesh& mesh = V_->mesh();
  const int chunks = detail::chunk_count(params_.threads);
  std::vector<Triplets> parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      const auto dofs = V_->cell_dofs(c);
      for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
          double v = 0.0;
          for (int q = 0; q < s.nq; ++q) v += w[q] * s.v(q, i).dot(s.v(q, j));
          parts[ch].emplace_back(dofs[i], dofs[j], v);
        }
      }
    }
  });
  Triplets t;
  detail::merge(t, parts);
  return build(V_->n_dofs(), V_->n_dofs(), t);
}

SparseMatrix FormAssembler::divergence() const {
  if (!Q_) throw Error(ErrorCode::InvalidArgument, "divergence form needs a pressure space");
  const Mesh& mesh = V_->mesh();
  const int chunks = detail::chunk_count(params_.threads);
  std::vector<Triplets> cell_parts(chunks), face_parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    ScalarShapes p;
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      evq_->cell(c, p);
      ev_.cell_points(c, x, w);
      const auto vd = V_->cell_dofs(c);
      const auto qd = Q_->cell_dofs(c);
      for (int i = 0; i < p.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
          double v = 0.0;
          for (int q = 0; q < s.nq; ++q) v += w[q] * s.d(q, j) * p.v(q, i);
          cell_parts[ch].emplace_back(qd[i], vd[j], v);
        }
      }
    }
  });
  detail::for_chunks(mesh.n_faces(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    ScalarShapes p;
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int f = b; f < e; ++f) {
      const Face& face = mesh.faces()[f];
      ev_.face_points(f, x, w);
      const double avg = face.is_boundary() ? 1.0 : 0.5;
      for (const FaceSide& test : sides_of(face)) {
        evq_->face(test.cell, test.edge, p);
        const auto qd = Q_->cell_dofs(test.cell);
        for (const FaceSide& trial : sides_of(face)) {
          ev_.face(trial.cell, trial.edge, s);
          const auto vd = V_->cell_dofs(trial.cell);
          for (int i = 0; i < p.n; ++i) {
            for (int j = 0; j < s.n; ++j) {
              double v = 0.0;
              for (int q = 0; q < s.nq; ++q) {
                v -= w[q] * trial.sigma * s.v(q, j).dot(face.normal) * avg * p.v(q, i);
              }
              face_parts[ch].emplace_back(qd[i], vd[j], v);
            }
          }
        }
      }
    }
  });
  Triplets t;
  detail::merge(t, cell_parts);
  detail::merge(t, face_parts);
  return build(Q_->n_dofs(), V_->n_dofs(), t);
}

Eigen::VectorXd FormAssembler::divergence_boundary(const BoundaryFunction& g) const {
  if (!Q_) throw Error(ErrorCode::InvalidArgument, "divergence form needs a pressure space");
  const Mesh& mesh = V_->mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Q_->n_dofs());
  ScalarShapes p;
  std::vector<Vec2> x;
  std::vector<double> w;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (!face.is_boundary()) continue;
    ev_.face_points(f, x, w);
    evq_->face(face.owner, face.owner_edge, p);
    const auto qd = Q_->cell_dofs(face.owner);
    for (int q = 0; q < p.nq; ++q) {
      const double gn = g(x[q], face.tag).dot(face.normal);
      for (int i = 0; i < p.n; ++i) out[qd[i]] += w[q] * gn * p.v(q, i);
    }
  }
  return out;
}

SparseMatrix FormAssembler::grad_div() const {
  const Mesh& mesh = V_->mesh();
  const double gamma = params_.gamma;
  const int chunks = detail::chunk_count(params_.threads);
  std::vector<Triplets> cell_parts(chunks), face_parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      const auto dofs = V_->cell_dofs(c);
      for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
          double v = 0.0;
          for (int q = 0; q < s.nq; ++q) v += w[q] * s.d(q, i) * s.d(q, j);
          cell_parts[ch].emplace_back(dofs[i], dofs[j], gamma * v);
        }
      }
    }
  });
  detail::for_chunks(mesh.n_faces(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes si, sj;
    std::vector<Vec2> x;
    std::vector<double> w;
    for (int f = b; f < e; ++f) {
      const Face& face = mesh.faces()[f];
      ev_.face_points(f, x, w);
      const double scale = gamma / face.diameter;
      for (const FaceSide& test : sides_of(face)) {
        ev_.face(test.cell, test.edge, si);
        const auto di = V_->cell_dofs(test.cell);
        for (const FaceSide& trial : sides_of(face)) {
          ev_.face(trial.cell, trial.edge, sj);
          const auto dj = V_->cell_dofs(trial.cell);
          for (int i = 0; i < si.n; ++i) {
            for (int j = 0; j < sj.n; ++j) {
              double v = 0.0;
              for (int q = 0; q < si.nq; ++q) {
                v += w[q] * si.v(q, i).dot(face.normal) * sj.v(q, j).dot(face.normal);
              }
              face_parts[ch].emplace_back(di[i], dj[j], scale * test.sigma * trial.sigma * v);
            }
          }
        }
      }
    }
  });
  Triplets t;
  detail::merge(t, cell_parts);
  detail::merge(t, face_parts);
  return build(V_->n_dofs(), V_->n_dofs(), t);
}

Eigen::VectorXd FormAssembler::grad_div_boundary(const BoundaryFunction& g) const {
  const Mesh& mesh = V_->mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V_->n_dofs());
  VectorShapes s;
  std::vector<Vec2> x;
  std::vector<double> w;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (!face.is_boundary()) continue;
    ev_.face_points(f, x, w);
    ev_.face(face.owner, face.owner_edge, s);
    const auto dofs = V_->cell_dofs(face.owner);
    const double scale = -params_.gamma / face.diameter;
    for (int q = 0; q < s.nq; ++q) {
      const double gn = g(x[q], face.tag).dot(face.normal);
      for (int i = 0; i < s.n; ++i) out[dofs[i]] += scale * w[q] * gn * s.v(q, i).dot(face.normal);
    }
  }
  return out;
}

SparseMatrix FormAssembler::viscous() const {
  const Mesh& mesh = V_->mesh();
  const ViscousTensor tensor = params_.tensor;
  const double eta = params_.penalty(V_->k());
  const int chunks = detail::chunk_count(params_.threads);
  std::vector<Triplets> cell_parts(chunks), face_parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x;
    std::vector<double> w;
    std::vector<Mat2> tau;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      tau.resize(s.grad.size());
      for (std::size_t i = 0; i < s.grad.size(); ++i) tau[i] = apply_tensor(tensor, s.grad[i]);
      const auto dofs = V_->cell_dofs(c);
      for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
          double v = 0.0;
          for (int q = 0; q < s.nq; ++q) v += w[q] * tau[q * s.n + j].cwiseProduct(s.g(q, i)).sum();
          cell_parts[ch].emplace_back(dofs[i], dofs[j], v);
        }
      }
    }
  });
  detail::for_chunks(mesh.n_faces(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes si, sj;
    std::vector<Vec2> x;
    std::vector<double> w, scratch;
    std::vector<Vec2> tni, tnj;  // tau(phi) n per point and shape
    for (int f = b; f < e; ++f) {
      const Face& face = mesh.faces()[f];
      ev_.face_points(f, x, w);
      const Vec2& n = face.normal;
      const double alpha = face.is_boundary() ? 1.0 : 0.5;
      const double pen = eta / face.diameter;
      for (const FaceSide& test : sides_of(face)) {
        ev_.face(test.cell, test.edge, si);
        tni.resize(si.grad.size());
        for (std::size_t i = 0; i < si.grad.size(); ++i) tni[i] = apply_tensor(tensor, si.grad[i]) * n;
        const auto di = V_->cell_dofs(test.cell);
        for (const FaceSide& trial : sides_of(face)) {
          ev_.face(trial.cell, trial.edge, sj);
          tnj.resize(sj.grad.size());
          for (std::size_t j = 0; j < sj.grad.size(); ++j) tnj[j] = apply_tensor(tensor, sj.grad[j]) * n;
          const auto dj = V_->cell_dofs(trial.cell);
          for (int i = 0; i < si.n; ++i) {
            for (int j = 0; j < sj.n; ++j) {
              double v = 0.0;
              for (int q = 0; q < si.nq; ++q) {
                const Vec2& wi = si.v(q, i);
                const Vec2& pj = sj.v(q, j);
                v += w[q] * (-trial.sigma * alpha * pj.dot(tni[q * si.n + i]) -
                             test.sigma * alpha * wi.dot(tnj[q * sj.n + j]) +
                             pen * test.sigma * trial.sigma * wi.dot(pj));
              }
              face_parts[ch].emplace_back(di[i], dj[j], v);
            }
          }
        }
      }
    }
  });
  Triplets t;
  detail::merge(t, cell_parts);
  detail::merge(t, face_parts);
  return build(V_->n_dofs(), V_->n_dofs(), t);
}

Eigen::VectorXd FormAssembler::viscous_boundary(const BoundaryFunction& g) const {
  const Mesh& mesh = V_->mesh();
  const double eta = params_.penalty(V_->k());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V_->n_dofs());
  VectorShapes s;
  std::vector<Vec2> x;
  std::vector<double> w;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (!face.is_boundary()) continue;
    ev_.face_points(f, x, w);
    ev_.face(face.owner, face.owner_edge, s);
    const auto dofs = V_->cell_dofs(face.owner);
    const double pen = eta / face.diameter;
    for (int q = 0; q < s.nq; ++q) {
      const Vec2 gv = g(x[q], face.tag);
      for (int i = 0; i < s.n; ++i) {
        const Vec2 tn = apply_tensor(params_.tensor, s.g(q, i)) * face.normal;
        out[dofs[i]] += w[q] * (gv.dot(tn) - pen * gv.dot(s.v(q, i)));
      }
    }
  }
  return out;
}

Eigen::VectorXd FormAssembler::load(const VectorFunction& f) const {
  const Mesh& mesh = V_->mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V_->n_dofs());
  const int chunks = detail::chunk_count(params_.threads);
  std::vector<Scatter> parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x;
    std::vector<double> w;
    std::vector<Vec2> fv;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      fv.resize(x.size());
      for (std::size_t q = 0; q < x.size(); ++q) fv[q] = f(x[q]);
      const auto dofs = V_->cell_dofs(c);
      for (int i = 0; i < s.n; ++i) {
        double v = 0.0;
        for (int q = 0; q < s.nq; ++q) v += w[q] * fv[q].dot(s.v(q, i));
        parts[ch].emplace_back(dofs[i], v);
      }
    }
  });
  detail::apply(out, parts);
  return out;
}

Eigen::VectorXd FormAssembler::pressure_mean_row() const {
  if (!Q_) throw Error(ErrorCode::InvalidArgument, "mean row needs a pressure space");
  const Mesh& mesh = V_->mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(Q_->n_dofs());
  ScalarShapes p;
  std::vector<Vec2> x;
  std::vector<double> w;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    evq_->cell(c, p);
    ev_.cell_points(c, x, w);
    const auto dofs = Q_->cell_dofs(c);
    for (int i = 0; i < p.n; ++i) {
      double v = 0.0;
      for (int q = 0; q < p.nq; ++q) v += w[q] * p.v(q, i);
      out[dofs[i]] += v;
    }
  }
  return out;
}

}  // namespace dgflow
