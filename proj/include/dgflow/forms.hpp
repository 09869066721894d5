#pragma once

#include <functional>
#include <string>

#include <Eigen/Sparse>

#include "dgflow/space.hpp"

namespace dgflow {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ConvectiveVariant { C0, C1, C2, CTilde };
enum class ViscousTensor { Grad, SymGrad, Deviatoric };

std::string to_string(ConvectiveVariant v);
ConvectiveVariant parse_variant(const std::string& s);
std::string to_string(ViscousTensor t);
ViscousTensor parse_tensor(const std::string& s);

struct FormParams {
  double theta = 0.0;
  double zeta = 0.0;            // upwind weight on interior faces
  double zeta_boundary = -1.0;  // on boundary faces; negative means "same as zeta"
  double gamma = 0.0;           // grad-div / normal-jump penalty
  double eta = -1.0;            // SIP penalty; negative means 3(k+1)(k+2)
  double nu = 0.0;
  ConvectiveVariant variant = ConvectiveVariant::C2;
  ViscousTensor tensor = ViscousTensor::Grad;
  bool allow_unstable = false;  // skip the boundary upwind floor check
  int threads = 1;

  double boundary_zeta() const { return zeta_boundary < 0.0 ? zeta : zeta_boundary; }
  double penalty(int k) const { return eta < 0.0 ? 3.0 * (k + 1) * (k + 2) : eta; }
};

/// Rejects parameter sets that break the energy-stability hypothesis of the
/// rotational forms on DG spaces (boundary upwind weight below 0.5|1-theta|),
/// and negative penalties or viscosity.
void check_params(const FormParams& params, const Space& velocity);
void check_params(const FormParams& params, SpaceKind velocity_kind);

/// Dirichlet data on boundary faces, as a function of position and face tag.
using BoundaryFunction = std::function<Vec2(const Vec2& x, int tag)>;

/// Assembles every discrete form on a velocity space V and (optionally) a
/// pressure space Q. Boundary data enters through a ghost exterior state:
/// trial-function jumps on boundary faces become u - g, and the g parts are
/// returned separately as right-hand-side corrections.
class FormAssembler {
 public:
  FormAssembler(const Space& velocity, const Space* pressure, FormParams params);

  const Space& velocity() const { return *V_; }
  const Space* pressure() const { return Q_; }
  const FormParams& params() const { return params_; }
  const ShapeEvaluator& velocity_evaluator() const { return ev_; }

  SparseMatrix mass() const;

  /// B(i, j) = b_h(phi_j, psi_i), over all faces.
  SparseMatrix divergence() const;
  /// Boundary-data part of b_h: <g.n, psi_i> on boundary faces.
  Eigen::VectorXd divergence_boundary(const BoundaryFunction& g) const;

  /// d_h including the factor gamma, and its boundary-data part.
  SparseMatrix grad_div() const;
  Eigen::VectorXd grad_div_boundary(const BoundaryFunction& g) const;

  /// a_h (without nu), and its boundary-data part.
  SparseMatrix viscous() const;
  Eigen::VectorXd viscous_boundary(const BoundaryFunction& g) const;

  /// (f, phi_i).
  Eigen::VectorXd load(const VectorFunction& f) const;

  /// integral of each pressure basis function.
  Eigen::VectorXd pressure_mean_row() const;

  /// Entries c_h(u; u, phi_i) with boundary data g (null means g = 0). The
  /// upwind factor |{u}.n| is evaluated from `frozen` when given.
  Eigen::VectorXd convective_residual(const Eigen::VectorXd& u, const BoundaryFunction* g = nullptr,
                                      const Eigen::VectorXd* frozen = nullptr) const;

  /// Derivative of convective_residual in u, with the upwind factor frozen at u.
  SparseMatrix convective_jacobian(const Eigen::VectorXd& u) const;

  /// c_h(beta; u, v) with zero boundary data. The rotational variants are only
  /// defined for beta == u.
  double convective_value(const Eigen::VectorXd& beta, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& v) const;

 private:
  const Space* V_;
  const Space* Q_;
  FormParams params_;
  ShapeEvaluator ev_;
  std::unique_ptr<ShapeEvaluator> evq_;
};

}  // namespace dgflow
