#include "dgflow/solver.hpp"

#include <cmath>
#include <sstream>

namespace dgflow {

namespace {

std::string format_history(const std::vector<double>& h) {
  std::ostringstream out;
  out.precision(3);
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? ", " : "") << std::scientific << h[i];
  return out.str();
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd& x, const NewtonConfig& config, LinearSolver& linear) {
  if (config.atol <= 0.0 || config.rtol <= 0.0 || config.max_iterations < 1) {
    throw Error(ErrorCode::InvalidConfig, "Newton tolerances must be > 0 and max_iterations >= 1");
  }
  NewtonResult result;
  Eigen::VectorXd r = residual(x);
  double norm = r.norm();
  result.history.push_back(norm);
  const double stop = std::max(config.atol, config.rtol * norm);
  while (norm > stop) {
    if (!std::isfinite(norm) || result.iterations >= config.max_iterations) {
      throw NewtonDiverged("Newton did not converge in " + std::to_string(result.iterations) +
                               " iterations; residual history: " + format_history(result.history),
                           result.history);
    }
    const SparseMatrix J = jacobian(x);
    x -= linear.solve(J, r);
    r = residual(x);
    norm = r.norm();
    result.history.push_back(norm);
    ++result.iterations;
  }
  return result;
}

FlowSolver::FlowSolver(const Space& velocity, const Space& pressure, FormParams params)
    : V_(&velocity),
      Q_(&pressure),
      forms_(velocity, &pressure, params),
      nv_(velocity.n_dofs()),
      np_(pressure.n_dofs()) {
  check_params(params, velocity);
  if (pressure.k() != velocity.k()) {
    throw Error(ErrorCode::InvalidArgument, "velocity and pressure spaces must share k");
  }
  M_ = forms_.mass();
  A_ = forms_.viscous();
  if (params.gamma > 0.0) D_ = forms_.grad_div();
  B_ = forms_.divergence();
  mean_ = forms_.pressure_mean_row();
  constrained_.assign(n_total(), 0);
  for (int d : velocity.constrained_dofs()) constrained_[d] = 1;
}

SolveState FlowSolver::initial_state(const Field& u0) const {
  if (u0.space != V_) throw Error(ErrorCode::InvalidArgument, "initial velocity is on a different space");
  SolveState s;
  s.u = u0;
  for (int i = 0; i < nv_; ++i) {
    if (constrained_[i]) s.u.coeffs[i] = 0.0;
  }
  s.p = Field(*Q_);
  return s;
}

Field FlowSolver::solenoidal_projection(const Field& u0) const {
  if (u0.space != V_) throw Error(ErrorCode::InvalidArgument, "velocity is on a different space");
  const SparseMatrix L = linear_block(1.0, 0.0, false);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_total());
  rhs.head(nv_) = M_ * u0.coeffs;
  for (int i = 0; i < nv_; ++i) {
    if (constrained_[i]) rhs[i] = 0.0;
  }
  LinearSolver lin;
  const Eigen::VectorXd X = lin.solve(L, rhs);
  Field u(*V_);
  u.coeffs = X.head(nv_);
  return u;
}

SparseMatrix FlowSolver::linear_block(double mass_scale, double nu, bool penalty) const {
  const int n = n_total();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(M_.nonZeros() + A_.nonZeros() + D_.nonZeros() + 2 * B_.nonZeros() + 2 * np_);
  auto add = [&](const SparseMatrix& m, double scale, int r0, int c0, bool transpose) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (transpose) {
          t.emplace_back(r0 + c, c0 + r, scale * it.value());
        } else {
          t.emplace_back(r0 + r, c0 + c, scale * it.value());
        }
      }
    }
  };
  if (mass_scale != 0.0) add(M_, mass_scale, 0, 0, false);
  if (nu != 0.0) add(A_, nu, 0, 0, false);
  if (penalty && D_.nonZeros() > 0) add(D_, 1.0, 0, 0, false);
  add(B_, -1.0, 0, nv_, true);
  add(B_, -1.0, nv_, 0, false);
  // The multiplier pins the first pressure coefficient and absorbs the mass
  // equation it displaces (the mass equations sum to zero for compatible data).
  // A dense mean-value row would ruin the fill of the sparse LU.
  t.emplace_back(nv_, n - 1, 1.0);
  t.emplace_back(n - 1, nv_, 1.0);
  SparseMatrix L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  constrain(L);
  return L;
}

void FlowSolver::zero_mean(Eigen::VectorXd& p) const {
  p.array() -= mean_.dot(p) / mean_.sum();
}

void FlowSolver::constrain(SparseMatrix& J) const {
  if (V_->constrained_dofs().empty()) return;
  J.prune([&](const Eigen::Index& r, const Eigen::Index& c, const double&) {
    return !constrained_[r] && !constrained_[c];
  });
  for (int d : V_->constrained_dofs()) J.coeffRef(d, d) = 1.0;
  J.makeCompressed();
}

FlowSolver::Rhs FlowSolver::boundary_terms(const FlowData& data, double t0, double t1,
                                           BoundaryTime mode, double nu) const {
  Rhs rhs;
  rhs.velocity = Eigen::VectorXd::Zero(nv_);
  rhs.pressure = Eigen::VectorXd::Zero(np_);
  const double tm = 0.5 * (t0 + t1);
  if (data.forcing) {
    rhs.velocity -= forms_.load([&](const Vec2& x) { return data.forcing(tm, x); });
  }
  if (data.boundary) {
    auto bnd = data.boundary;
    if (mode == BoundaryTime::Average && t0 != t1) {
      rhs.g = [bnd, t0, t1](const Vec2& x, int tag) {
        return Vec2(0.5 * (bnd(t0, x, tag) + bnd(t1, x, tag)));
      };
    } else {
      rhs.g = [bnd, tm](const Vec2& x, int tag) { return bnd(tm, x, tag); };
    }
    rhs.has_g = true;
    if (nu != 0.0) rhs.velocity += nu * forms_.viscous_boundary(rhs.g);
    if (forms_.params().gamma > 0.0) rhs.velocity += forms_.grad_div_boundary(rhs.g);
    rhs.pressure -= forms_.divergence_boundary(rhs.g);
  }
  return rhs;
}

Eigen::VectorXd FlowSolver::residual(const SparseMatrix& L, const Eigen::VectorXd& X, const Rhs& rhs,
                                     bool convective, const FormAssembler& forms) const {
  Eigen::VectorXd r = L * X;
  r.head(nv_) += rhs.velocity;
  r.segment(nv_, np_) += rhs.pressure;
  if (convective) {
    const Eigen::VectorXd w = X.head(nv_);
    r.head(nv_) += forms.convective_residual(w, rhs.has_g ? &rhs.g : nullptr);
  }
  for (int i = 0; i < nv_; ++i) {
    if (constrained_[i]) r[i] = 0.0;
  }
  return r;
}

SparseMatrix FlowSolver::jacobian(const SparseMatrix& L, const Eigen::VectorXd& X, bool convective,
                                  const FormAssembler& forms) const {
  if (!convective) return L;
  SparseMatrix jc = forms.convective_jacobian(X.head(nv_));
  jc.conservativeResize(n_total(), n_total());
  SparseMatrix J = L + jc;
  constrain(J);
  return J;
}

void FlowSolver::cn_step(SolveState& state, double tau, const FlowData& data,
                         const NewtonConfig& config, BoundaryTime boundary_time) {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const double nu = forms_.params().nu;
  const SparseMatrix L = linear_block(2.0 / tau, nu);
  Rhs rhs = boundary_terms(data, state.t, state.t + tau, boundary_time, nu);
  rhs.velocity -= (2.0 / tau) * (M_ * state.u.coeffs);
  for (int i = 0; i < nv_; ++i) {
    if (constrained_[i]) rhs.velocity[i] = 0.0;
  }

  Eigen::VectorXd X = Eigen::VectorXd::Zero(n_total());
  X.head(nv_) = state.u.coeffs;
  X.segment(nv_, np_) = state.p.coeffs.array() - state.p.coeffs[0];
  state.newton = newton_solve(
      [&](const Eigen::VectorXd& x) { return residual(L, x, rhs, true, forms_); },
      [&](const Eigen::VectorXd& x) { return jacobian(L, x, true, forms_); }, X, config, linear_);
  state.u.coeffs = 2.0 * X.head(nv_) - state.u.coeffs;
  state.p.coeffs = X.segment(nv_, np_);
  zero_mean(state.p.coeffs);
  state.t += tau;
  ++state.step;
}

SolveState FlowSolver::stationary_attempt(const FlowData& data, const NewtonConfig& config, double nu,
                                          const Eigen::VectorXd* guess, bool stokes_guess) {
  const SparseMatrix L = linear_block(0.0, nu);
  const Rhs rhs = boundary_terms(data, 0.0, 0.0, BoundaryTime::Midpoint, nu);
  Eigen::VectorXd X = Eigen::VectorXd::Zero(n_total());
  if (guess) {
    X = *guess;
  } else if (stokes_guess) {
    const Eigen::VectorXd r0 = residual(L, X, rhs, false, forms_);
    X = -linear_.solve(L, r0);
  }
  SolveState s;
  s.newton = newton_solve(
      [&](const Eigen::VectorXd& x) { return residual(L, x, rhs, true, forms_); },
      [&](const Eigen::VectorXd& x) { return jacobian(L, x, true, forms_); }, X, config, linear_);
  s.u = Field(*V_, X.head(nv_));
  s.p = Field(*Q_, X.segment(nv_, np_));
  zero_mean(s.p.coeffs);
  return s;
}

SolveState FlowSolver::solve_stationary(const FlowData& data, const NewtonConfig& config,
                                        const StationaryPolicy& policy) {
  const double nu = forms_.params().nu;
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidConfig, "stationary solves need nu > 0");
  try {
    return stationary_attempt(data, config, nu, nullptr, policy.stokes_guess);
  } catch (const NewtonDiverged& e) {
    if (!policy.continuation) {
      throw NewtonDiverged(std::string(e.what()) + " (consider enabling viscosity continuation)",
                           e.history());
    }
  }
  // Raise the viscosity until Newton converges, then march back down.
  int level = 0;
  SolveState s;
  for (level = 1; level <= 12; ++level) {
    try {
      s = stationary_attempt(data, config, nu * std::pow(2.0, level), nullptr, true);
      break;
    } catch (const NewtonDiverged&) {
      if (level == 12) throw;
    }
  }
  for (int l = level - 1; l >= 0; --l) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(n_total());
    X.head(nv_) = s.u.coeffs;
    X.segment(nv_, np_) = s.p.coeffs.array() - s.p.coeffs[0];
    s = stationary_attempt(data, config, nu * std::pow(2.0, l), &X, false);
  }
  return s;
}

Eigen::VectorXd FlowSolver::mass_residual(const Field& u, const FlowData& data, double t) const {
  Eigen::VectorXd r = B_ * u.coeffs;
  if (data.boundary) {
    auto bnd = data.boundary;
    r += forms_.divergence_boundary([&](const Vec2& x, int tag) { return bnd(t, x, tag); });
  }
  return r;
}

}  // namespace dgflow
