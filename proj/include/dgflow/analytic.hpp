#pragma once

#include <functional>
#include <string>

#include "dgflow/mesh.hpp"

namespace dgflow {

using TimeVectorFunction = std::function<Vec2(double, const Vec2&)>;
using TimeScalarFunction = std::function<double(double, const Vec2&)>;
using TimeBoundaryFunction = std::function<Vec2(double, const Vec2&, int)>;

/// Closed-form benchmark flow. `pressure` is the kinematic pressure (defined
/// up to a constant); `forcing` is null when the flow is unforced.
struct AnalyticSolution {
  std::string name;
  TimeVectorFunction velocity;
  TimeScalarFunction pressure;
  TimeVectorFunction forcing;
  TimeBoundaryFunction boundary;
  double nu = 0.0;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  bool steady = false;
};

/// Gresho vortex on [-0.5, 0.5]^2, a steady Euler solution.
AnalyticSolution gresho();
double gresho_c1();
double gresho_c2();

/// Taylor-Green vortex on [0, 2 pi]^2. The forcing nu * Lap u lets the Euler
/// equations reproduce the viscous decay.
AnalyticSolution taylor_green(double nu);

/// Kovasznay flow on [-0.5, 1.5] x [0, 2].
AnalyticSolution kovasznay(double nu);
double kovasznay_lambda(double nu);

/// Decaying vortex array on [-0.5, 0.5]^2.
AnalyticSolution kim_moin(double nu);

/// Parabolic in/outflow profile of the cylinder channel (height 0.41).
Vec2 cylinder_inflow(double t, double x2);
/// Dirichlet data of the cylinder channel: the profile on the inflow and
/// outflow tags, no-slip elsewhere.
TimeBoundaryFunction cylinder_boundary(int inflow_tag, int outflow_tag);

/// Lid speed of the driven cavity, and its data (lid on tag `lid_tag`).
Vec2 lid_velocity();
TimeBoundaryFunction lid_boundary(int lid_tag);

/// Polynomial steady solution on the unit square: velocity of degree k+1
/// (curl of a stream function), Bernoulli-type variable P of degree k, and
/// the forcing that makes it exact for the theta-formulation with viscosity nu.
/// `pressure` returns the kinematic pressure P - theta/2 |u|^2.
AnalyticSolution manufactured(int k, double nu, double theta);
/// The generalized pressure P of the manufactured solution.
double manufactured_P(int k, const Vec2& x);

}  // namespace dgflow
