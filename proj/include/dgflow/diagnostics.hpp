#pragma once

#include <functional>
#include <optional>

#include "dgflow/space.hpp"

namespace dgflow {

struct ConservationRecord {
  double t = 0.0;
  double energy = 0.0;
  Vec2 momentum = Vec2::Zero();
  double angular_momentum = 0.0;
  std::optional<double> l2_error;
};

/// 1/2 ||u||^2.
double kinetic_energy(const Field& u);

/// (integral u_1, integral u_2).
Vec2 linear_momentum(const Field& u);

/// integral (x1 - o1) u2 - (x2 - o2) u1.
double angular_momentum(const Field& u, const Vec2& origin = Vec2::Zero());

/// ||u_h - u||_{L2}, integrated two degrees above the assembly rule.
double l2_error(const Field& u, const VectorFunction& exact);
double l2_error(const Field& p, const ScalarFunction& exact);

/// ||div_h u||_{L2} (broken divergence).
double divergence_norm(const Field& u);

/// Cell-wise L2 projection of the broken curl onto a scalar DG space.
Field vorticity(const Field& u, const Space& scalar_space);

/// Projection of P - theta/2 |u|^2 onto P's space, shifted to zero mean.
Field recover_kinematic_pressure(const Field& P, const Field& u, double theta);

ConservationRecord conservation_record(const Field& u, double t, const Vec2& origin);

}  // namespace dgflow
