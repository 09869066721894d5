// Convective forms in the self-convection pattern c_h(u; u, v).
//
// Every variant is written as
//   volume:   w.F + (div w) S,  F = G u + c2/2 D u - tt G^T u,  S = -c4 theta/2 |u|^2
//   interior: w^s.Q_s,  Q_s = -an/2 j - c2/4 jn u^s + tt/2 (j.a) n + c4 theta/2 sigma_s uu n
//                              + sigma_s upw j
//   boundary: upw (u - g).w
// with G = grad u, D = div u, a = {u}, j = [[u]], an = a.n, jn = j.n,
// uu = {|u|^2}, upw = zeta |a.n|, and (c2, tt, c4) per variant.

#include <cmath>

#include "dgflow/error.hpp"
#include "dgflow/forms.hpp"
#include "parallel.hpp"

namespace dgflow {

using detail::Scatter;
using detail::Triplets;

namespace {

struct Coefficients {
  double c2;
  double tt;
  double c4;
};

Coefficients coefficients(ConvectiveVariant v, double theta) {
  switch (v) {
    case ConvectiveVariant::C0: return {1.0, 0.0, 0.0};
    case ConvectiveVariant::C1: return {1.0, theta, 1.0};
    case ConvectiveVariant::C2: return {1.0 - theta, theta, 0.0};
    case ConvectiveVariant::CTilde: return {0.0, 0.0, 0.0};
  }
  return {1.0, 0.0, 0.0};
}

// Field values and gradients at the points of a shape table.
void interpolate(const VectorShapes& s, std::span<const int> dofs, const Eigen::VectorXd& c,
                 std::vector<Vec2>& u, std::vector<Mat2>* g = nullptr,
                 std::vector<double>* div = nullptr) {
  u.assign(s.nq, Vec2::Zero());
  if (g) g->assign(s.nq, Mat2::Zero());
  if (div) div->assign(s.nq, 0.0);
  for (int i = 0; i < s.n; ++i) {
    const double ci = c[dofs[i]];
    if (ci == 0.0) continue;
    for (int q = 0; q < s.nq; ++q) {
      u[q] += ci * s.v(q, i);
      if (g) (*g)[q] += ci * s.g(q, i);
      if (div) (*div)[q] += ci * s.d(q, i);
    }
  }
}

}  // namespace

Eigen::VectorXd FormAssembler::convective_residual(const Eigen::VectorXd& u,
                                                   const BoundaryFunction* g,
                                                   const Eigen::VectorXd* frozen) const {
  const Mesh& mesh = V_->mesh();
  const Coefficients k = coefficients(params_.variant, params_.theta);
  const double theta = params_.theta;
  const double zeta = params_.zeta;
  const double zeta_b = params_.boundary_zeta();
  const Eigen::VectorXd& uf = frozen ? *frozen : u;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(V_->n_dofs());
  const int chunks = detail::chunk_count(params_.threads);

  std::vector<Scatter> cell_parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x, uq;
    std::vector<double> w, dq;
    std::vector<Mat2> gq;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      const auto dofs = V_->cell_dofs(c);
      interpolate(s, dofs, u, uq, &gq, &dq);
      std::vector<Vec2> F(s.nq);
      std::vector<double> S(s.nq);
      for (int q = 0; q < s.nq; ++q) {
        F[q] = gq[q] * uq[q] + 0.5 * k.c2 * dq[q] * uq[q] - k.tt * gq[q].transpose() * uq[q];
        S[q] = -0.5 * k.c4 * theta * uq[q].squaredNorm();
      }
      for (int i = 0; i < s.n; ++i) {
        double v = 0.0;
        for (int q = 0; q < s.nq; ++q) v += w[q] * (s.v(q, i).dot(F[q]) + s.d(q, i) * S[q]);
        cell_parts[ch].emplace_back(dofs[i], v);
      }
    }
  });

  std::vector<Scatter> face_parts(chunks);
  detail::for_chunks(mesh.n_faces(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes sp, sm;
    std::vector<Vec2> x, up, um, fp, fm;
    std::vector<double> w;
    for (int f = b; f < e; ++f) {
      const Face& face = mesh.faces()[f];
      const Vec2& n = face.normal;
      ev_.face_points(f, x, w);
      ev_.face(face.owner, face.owner_edge, sp);
      const auto dp = V_->cell_dofs(face.owner);
      interpolate(sp, dp, u, up);
      if (face.is_boundary()) {
        if (frozen) interpolate(sp, dp, uf, fp);
        for (int i = 0; i < sp.n; ++i) {
          double v = 0.0;
          for (int q = 0; q < sp.nq; ++q) {
            const Vec2 ub = frozen ? fp[q] : up[q];
            const Vec2 gv = g ? (*g)(x[q], face.tag) : Vec2::Zero();
            v += w[q] * zeta_b * std::abs(ub.dot(n)) * (up[q] - gv).dot(sp.v(q, i));
          }
          face_parts[ch].emplace_back(dp[i], v);
        }
        continue;
      }
      ev_.face(face.neighbor, face.neighbor_edge, sm);
      const auto dm = V_->cell_dofs(face.neighbor);
      interpolate(sm, dm, u, um);
      if (frozen) {
        interpolate(sp, dp, uf, fp);
        interpolate(sm, dm, uf, fm);
      }
      std::vector<Vec2> qp(sp.nq), qm(sp.nq);
      for (int q = 0; q < sp.nq; ++q) {
        const Vec2 a = 0.5 * (up[q] + um[q]);
        const Vec2 j = up[q] - um[q];
        const double an = a.dot(n);
        const double jn = j.dot(n);
        const double uu = 0.5 * (up[q].squaredNorm() + um[q].squaredNorm());
        const double upw =
            zeta * std::abs(frozen ? (0.5 * (fp[q] + fm[q])).dot(n) : an);
        const Vec2 common = -0.5 * an * j + 0.5 * k.tt * j.dot(a) * n;
        const Vec2 odd = 0.5 * k.c4 * theta * uu * n + upw * j;
        qp[q] = common - 0.25 * k.c2 * jn * up[q] + odd;
        qm[q] = common - 0.25 * k.c2 * jn * um[q] - odd;
      }
      for (int i = 0; i < sp.n; ++i) {
        double v = 0.0;
        for (int q = 0; q < sp.nq; ++q) v += w[q] * sp.v(q, i).dot(qp[q]);
        face_parts[ch].emplace_back(dp[i], v);
      }
      for (int i = 0; i < sm.n; ++i) {
        double v = 0.0;
        for (int q = 0; q < sm.nq; ++q) v += w[q] * sm.v(q, i).dot(qm[q]);
        face_parts[ch].emplace_back(dm[i], v);
      }
    }
  });
  detail::apply(out, cell_parts);
  detail::apply(out, face_parts);
  return out;
}

SparseMatrix FormAssembler::convective_jacobian(const Eigen::VectorXd& u) const {
  const Mesh& mesh = V_->mesh();
  const Coefficients k = coefficients(params_.variant, params_.theta);
  const double theta = params_.theta;
  const double zeta = params_.zeta;
  const double zeta_b = params_.boundary_zeta();
  const int chunks = detail::chunk_count(params_.threads);

  std::vector<Triplets> cell_parts(chunks);
  detail::for_chunks(mesh.n_cells(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes s;
    std::vector<Vec2> x, uq;
    std::vector<double> w, dq;
    std::vector<Mat2> gq;
    std::vector<Vec2> dF;
    std::vector<double> dS;
    for (int c = b; c < e; ++c) {
      ev_.cell(c, s);
      ev_.cell_points(c, x, w);
      const auto dofs = V_->cell_dofs(c);
      interpolate(s, dofs, u, uq, &gq, &dq);
      dF.resize(static_cast<std::size_t>(s.n) * s.nq);
      dS.resize(dF.size());
      for (int q = 0; q < s.nq; ++q) {
        for (int j = 0; j < s.n; ++j) {
          const Vec2& d = s.v(q, j);
          const Mat2& E = s.g(q, j);
          const double ed = s.d(q, j);
          dF[q * s.n + j] = E * uq[q] + gq[q] * d + 0.5 * k.c2 * (ed * uq[q] + dq[q] * d) -
                            k.tt * (E.transpose() * uq[q] + gq[q].transpose() * d);
          dS[q * s.n + j] = -k.c4 * theta * uq[q].dot(d);
        }
      }
      for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
          double v = 0.0;
          for (int q = 0; q < s.nq; ++q) {
            v += w[q] * (s.v(q, i).dot(dF[q * s.n + j]) + s.d(q, i) * dS[q * s.n + j]);
          }
          cell_parts[ch].emplace_back(dofs[i], dofs[j], v);
        }
      }
    }
  });

  std::vector<Triplets> face_parts(chunks);
  detail::for_chunks(mesh.n_faces(), params_.threads, chunks, [&](int b, int e, int ch) {
    VectorShapes sp, sm;
    std::vector<Vec2> x, up, um;
    std::vector<double> w;
    std::vector<Vec2> dq;  // dQ_s for one trial shape at each point
    for (int f = b; f < e; ++f) {
      const Face& face = mesh.faces()[f];
      const Vec2& n = face.normal;
      ev_.face_points(f, x, w);
      ev_.face(face.owner, face.owner_edge, sp);
      const auto dp = V_->cell_dofs(face.owner);
      interpolate(sp, dp, u, up);
      if (face.is_boundary()) {
        for (int i = 0; i < sp.n; ++i) {
          for (int j = 0; j < sp.n; ++j) {
            double v = 0.0;
            for (int q = 0; q < sp.nq; ++q) {
              v += w[q] * zeta_b * std::abs(up[q].dot(n)) * sp.v(q, j).dot(sp.v(q, i));
            }
            face_parts[ch].emplace_back(dp[i], dp[j], v);
          }
        }
        continue;
      }
      ev_.face(face.neighbor, face.neighbor_edge, sm);
      const auto dm = V_->cell_dofs(face.neighbor);
      interpolate(sm, dm, u, um);
      const VectorShapes* shapes[2] = {&sp, &sm};
      const std::span<const int> dofs[2] = {dp, dm};
      const std::vector<Vec2>* us[2] = {&up, &um};
      const double sig[2] = {1.0, -1.0};
      dq.resize(sp.nq);
      for (int r = 0; r < 2; ++r) {
        const VectorShapes& sr = *shapes[r];
        for (int j = 0; j < sr.n; ++j) {
          for (int s = 0; s < 2; ++s) {
            for (int q = 0; q < sp.nq; ++q) {
              const Vec2& d = sr.v(q, j);
              const Vec2 a = 0.5 * (up[q] + um[q]);
              const Vec2 jj = up[q] - um[q];
              const double an = a.dot(n);
              const double jn = jj.dot(n);
              const double upw = zeta * std::abs(an);
              const Vec2 da = 0.5 * d;
              const Vec2 dj = sig[r] * d;
              const double dan = da.dot(n);
              const double djn = dj.dot(n);
              const Vec2 dus = (s == r) ? d : Vec2::Zero();
              const double duu = (*us[r])[q].dot(d);
              dq[q] = -0.5 * (dan * jj + an * dj) -
                      0.25 * k.c2 * (djn * (*us[s])[q] + jn * dus) +
                      0.5 * k.tt * (dj.dot(a) + jj.dot(da)) * n +
                      sig[s] * (0.5 * k.c4 * theta * duu * n + upw * dj);
            }
            const VectorShapes& ss = *shapes[s];
            for (int i = 0; i < ss.n; ++i) {
              double v = 0.0;
              for (int q = 0; q < ss.nq; ++q) v += w[q] * ss.v(q, i).dot(dq[q]);
              face_parts[ch].emplace_back(dofs[s][i], dofs[r][j], v);
            }
          }
        }
      }
    }
  });
  Triplets t;
  detail::merge(t, cell_parts);
  detail::merge(t, face_parts);
  SparseMatrix m(V_->n_dofs(), V_->n_dofs());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double FormAssembler::convective_value(const Eigen::VectorXd& beta, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v) const {
  const bool rotational = params_.variant == ConvectiveVariant::C1 ||
                          params_.variant == ConvectiveVariant::C2;
  if (rotational) {
    if (beta.size() != u.size() || beta != u) {
      throw Error(ErrorCode::InvalidArgument,
                  "rotational convective forms are only defined for c_h(u; u, v)");
    }
    return convective_residual(u).dot(v);
  }
  const double c2 = params_.variant == ConvectiveVariant::C0 ? 1.0 : 0.0;
  const double zeta = params_.zeta;
  const double zeta_b = params_.boundary_zeta();
  const Mesh& mesh = V_->mesh();
  double total = 0.0;
  VectorShapes s, sm;
  std::vector<Vec2> x, bq, uq, vq, bm, um, vm;
  std::vector<double> w, bdiv;
  std::vector<Mat2> ug;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    ev_.cell(c, s);
    ev_.cell_points(c, x, w);
    const auto dofs = V_->cell_dofs(c);
    interpolate(s, dofs, beta, bq, nullptr, &bdiv);
    interpolate(s, dofs, u, uq, &ug);
    interpolate(s, dofs, v, vq);
    for (int q = 0; q < s.nq; ++q) {
      total += w[q] * ((ug[q] * bq[q]).dot(vq[q]) + 0.5 * c2 * bdiv[q] * uq[q].dot(vq[q]));
    }
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    const Vec2& n = face.normal;
    ev_.face_points(f, x, w);
    ev_.face(face.owner, face.owner_edge, s);
    const auto dp = V_->cell_dofs(face.owner);
    interpolate(s, dp, beta, bq);
    interpolate(s, dp, u, uq);
    interpolate(s, dp, v, vq);
    if (face.is_boundary()) {
      for (int q = 0; q < s.nq; ++q) {
        total += w[q] * zeta_b * std::abs(bq[q].dot(n)) * uq[q].dot(vq[q]);
      }
      continue;
    }
    ev_.face(face.neighbor, face.neighbor_edge, sm);
    const auto dm = V_->cell_dofs(face.neighbor);
    interpolate(sm, dm, beta, bm);
    interpolate(sm, dm, u, um);
    interpolate(sm, dm, v, vm);
    for (int q = 0; q < s.nq; ++q) {
      const double ban = 0.5 * (bq[q] + bm[q]).dot(n);
      const double bjn = (bq[q] - bm[q]).dot(n);
      const Vec2 ju = uq[q] - um[q];
      const Vec2 jv = vq[q] - vm[q];
      const Vec2 av = 0.5 * (vq[q] + vm[q]);
      const double auv = 0.5 * (uq[q].dot(vq[q]) + um[q].dot(vm[q]));
      total += w[q] * (-ban * ju.dot(av) - 0.5 * c2 * bjn * auv + zeta * std::abs(ban) * ju.dot(jv));
    }
  }
  return total;
}

}  // namespace dgflow
