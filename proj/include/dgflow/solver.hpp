#pragma once

#include <functional>
#include <vector>

#include "dgflow/error.hpp"
#include "dgflow/forms.hpp"
#include "dgflow/linear_solver.hpp"

namespace dgflow {

struct NewtonConfig {
  double atol = 1e-8;
  double rtol = 1e-8;
  int max_iterations = 50;

  static NewtonConfig transient() { return {1e-8, 1e-8, 50}; }
  static NewtonConfig stationary() { return {1e-10, 1e-10, 50}; }
  static NewtonConfig tightened() { return {1e-12, 1e-12, 50}; }
};

struct NewtonResult {
  int iterations = 0;
  std::vector<double> history;  // residual norms, starting with the initial one
};

class NewtonDiverged : public Error {
 public:
  NewtonDiverged(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::NewtonDiverged, what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<SparseMatrix(const Eigen::VectorXd&)>;

/// Newton iteration until ||R|| <= max(atol, rtol ||R0||) (Euclidean norm).
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd& x, const NewtonConfig& config, LinearSolver& linear);

/// Time-dependent forcing f(t, x) and Dirichlet data g(t, x, tag).
struct FlowData {
  std::function<Vec2(double, const Vec2&)> forcing;              // null: f = 0
  std::function<Vec2(double, const Vec2&, int)> boundary;        // null: g = 0
};

enum class BoundaryTime {
  Average,   // g^{n+1/2} = (g(t_n) + g(t_{n+1})) / 2
  Midpoint,  // g^{n+1/2} = g(t_n + tau/2)
};

struct TransientConfig {
  double tau = 0.01;
  double T = 1.0;
  int output_every = 1;  // diagnostics cadence in steps
  BoundaryTime boundary_time = BoundaryTime::Average;
};

struct SolveState {
  Field u;        // u^n
  Field p;        // P^{n-1/2} (the last midpoint pressure)
  double t = 0.0;
  int step = 0;
  NewtonResult newton;
};

struct StationaryPolicy {
  bool stokes_guess = true;
  bool continuation = false;
};

/// Assembled Navier-Stokes / Euler problem on a velocity-pressure pair.
/// Unknowns are ordered velocity, pressure, then one multiplier fixing the
/// pressure constant. Returned pressures have zero mean. Constrained (boundary-normal) Hdiv dofs are removed
/// by identity rows.
class FlowSolver {
 public:
  FlowSolver(const Space& velocity, const Space& pressure, FormParams params);

  const FormAssembler& forms() const { return forms_; }
  const FormParams& params() const { return forms_.params(); }
  int n_velocity() const { return nv_; }
  int n_pressure() const { return np_; }
  /// Velocity + pressure dofs + the mean-value multiplier.
  int n_total() const { return nv_ + np_ + 1; }

  SolveState initial_state(const Field& u0) const;

  /// Mass-weighted closest velocity with b_h(v, q) = 0 for all q and zero
  /// boundary data. Interpolated initial data of a non-polynomial flow is only
  /// approximately solenoidal; this removes the defect.
  Field solenoidal_projection(const Field& u0) const;

  /// One Crank-Nicolson step from state.t to state.t + tau.
  void cn_step(SolveState& state, double tau, const FlowData& data, const NewtonConfig& config,
               BoundaryTime boundary_time = BoundaryTime::Average);

  /// Steady problem; requires nu > 0.
  SolveState solve_stationary(const FlowData& data, const NewtonConfig& config,
                              const StationaryPolicy& policy = {});

  /// Residual of the mass equation b_h(u, q) + boundary data, for all q.
  Eigen::VectorXd mass_residual(const Field& u, const FlowData& data, double t) const;

  LinearSolver& linear_solver() { return linear_; }

 private:
  struct Rhs {
    Eigen::VectorXd velocity;  // everything independent of the unknowns
    Eigen::VectorXd pressure;
    BoundaryFunction g;
    bool has_g = false;
  };
  Rhs boundary_terms(const FlowData& data, double t0, double t1, BoundaryTime mode, double nu) const;
  SparseMatrix linear_block(double mass_scale, double nu, bool penalty = true) const;
  Eigen::VectorXd residual(const SparseMatrix& L, const Eigen::VectorXd& X, const Rhs& rhs,
                           bool convective, const FormAssembler& forms) const;
  SparseMatrix jacobian(const SparseMatrix& L, const Eigen::VectorXd& X, bool convective,
                        const FormAssembler& forms) const;
  void constrain(SparseMatrix& J) const;
  void zero_mean(Eigen::VectorXd& p) const;
  SolveState stationary_attempt(const FlowData& data, const NewtonConfig& config, double nu,
                                const Eigen::VectorXd* guess, bool stokes_guess);

  const Space* V_;
  const Space* Q_;
  FormAssembler forms_;
  int nv_, np_;
  SparseMatrix M_, A_, D_, B_;
  Eigen::VectorXd mean_;
  std::vector<char> constrained_;  // over the full unknown vector
  LinearSolver linear_;
};

}  // namespace dgflow
