#include "dgflow/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "dgflow/error.hpp"

namespace dgflow {

using std::numbers::pi;

double gresho_c2() { return 6.0 - 4.0 * std::log(0.4); }
double gresho_c1() { return gresho_c2() - 4.0 + 4.0 * std::log(0.2); }

AnalyticSolution gresho() {
  AnalyticSolution s;
  s.name = "gresho";
  s.lo = Vec2(-0.5, -0.5);
  s.hi = Vec2(0.5, 0.5);
  s.steady = true;
  s.velocity = [](double, const Vec2& x) -> Vec2 {
    const double r = x.norm();
    double uphi = 0.0;
    if (r <= 0.2) {
      uphi = 5.0 * r;
    } else if (r <= 0.4) {
      uphi = 2.0 - 5.0 * r;
    }
    if (r == 0.0) return Vec2::Zero();
    return uphi * Vec2(-x.y() / r, x.x() / r);
  };
  const double c1 = gresho_c1(), c2 = gresho_c2();
  s.pressure = [c1, c2](double, const Vec2& x) {
    const double r = x.norm();
    if (r <= 0.2) return 12.5 * r * r + c1;
    if (r <= 0.4) return 12.5 * r * r - 20.0 * r + 4.0 * std::log(r) + c2;
    return 0.0;
  };
  s.boundary = [](double, const Vec2&, int) { return Vec2::Zero(); };
  return s;
}

AnalyticSolution taylor_green(double nu) {
  if (nu < 0.0) throw Error(ErrorCode::InvalidArgument, "taylor_green needs nu >= 0");
  AnalyticSolution s;
  s.name = "taylor_green";
  s.nu = nu;
  s.lo = Vec2(0.0, 0.0);
  s.hi = Vec2(2.0 * pi, 2.0 * pi);
  s.velocity = [nu](double t, const Vec2& x) {
    const double d = std::exp(-2.0 * nu * t);
    return Vec2(std::sin(x.x()) * std::cos(x.y()) * d, -std::cos(x.x()) * std::sin(x.y()) * d);
  };
  s.pressure = [nu](double t, const Vec2& x) {
    return 0.25 * (std::cos(2.0 * x.x()) + std::cos(2.0 * x.y())) * std::exp(-4.0 * nu * t);
  };
  auto vel = s.velocity;
  s.forcing = [vel, nu](double t, const Vec2& x) { return Vec2(-2.0 * nu * vel(t, x)); };
  s.boundary = [vel](double t, const Vec2& x, int) { return vel(t, x); };
  return s;
}

double kovasznay_lambda(double nu) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "kovasznay needs nu > 0");
  return 1.0 / (2.0 * nu) - std::sqrt(1.0 / (4.0 * nu * nu) + 4.0 * pi * pi);
}

AnalyticSolution kovasznay(double nu) {
  const double lam = kovasznay_lambda(nu);
  AnalyticSolution s;
  s.name = "kovasznay";
  s.nu = nu;
  s.lo = Vec2(-0.5, 0.0);
  s.hi = Vec2(1.5, 2.0);
  s.steady = true;
  s.velocity = [lam](double, const Vec2& x) {
    const double e = std::exp(lam * x.x());
    return Vec2(1.0 - e * std::cos(2.0 * pi * x.y()), lam / (2.0 * pi) * e * std::sin(2.0 * pi * x.y()));
  };
  s.pressure = [lam](double, const Vec2& x) { return 0.5 * (1.0 - std::exp(2.0 * lam * x.x())); };
  auto vel = s.velocity;
  s.boundary = [vel](double t, const Vec2& x, int) { return vel(t, x); };
  return s;
}

AnalyticSolution kim_moin(double nu) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "kim_moin needs nu > 0");
  AnalyticSolution s;
  s.name = "kim_moin";
  s.nu = nu;
  s.lo = Vec2(-0.5, -0.5);
  s.hi = Vec2(0.5, 0.5);
  s.velocity = [nu](double t, const Vec2& x) {
    const double d = std::exp(-2.0 * pi * pi * nu * t);
    return Vec2(-std::cos(pi * x.x()) * std::sin(pi * x.y()) * d,
                std::sin(pi * x.x()) * std::cos(pi * x.y()) * d);
  };
  s.pressure = [nu](double t, const Vec2& x) {
    return -0.25 * (std::cos(2.0 * pi * x.x()) + std::cos(2.0 * pi * x.y())) *
           std::exp(-4.0 * pi * pi * nu * t);
  };
  auto vel = s.velocity;
  s.boundary = [vel](double t, const Vec2& x, int) { return vel(t, x); };
  return s;
}

Vec2 cylinder_inflow(double t, double x2) {
  constexpr double H = 0.41;
  if (x2 < -1e-12 || x2 > H + 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "cylinder inflow height out of range [0, 0.41]");
  }
  return Vec2(6.0 / (H * H) * std::sin(pi * t / 8.0) * x2 * (H - x2), 0.0);
}

TimeBoundaryFunction cylinder_boundary(int inflow_tag, int outflow_tag) {
  return [inflow_tag, outflow_tag](double t, const Vec2& x, int tag) -> Vec2 {
    if (tag == inflow_tag || tag == outflow_tag) {
      return cylinder_inflow(t, std::clamp(x.y(), 0.0, 0.41));
    }
    return Vec2::Zero();
  };
}

Vec2 lid_velocity() { return Vec2(1.0, 0.0); }

TimeBoundaryFunction lid_boundary(int lid_tag) {
  return [lid_tag](double, const Vec2&, int tag) -> Vec2 {
    return tag == lid_tag ? lid_velocity() : Vec2::Zero();
  };
}

namespace {

// Bivariate polynomial sum c_ab x^a y^b.
struct Poly {
  std::map<std::pair<int, int>, double> c;

  double operator()(const Vec2& x) const {
    double v = 0.0;
    for (const auto& [e, k] : c) v += k * std::pow(x.x(), e.first) * std::pow(x.y(), e.second);
    return v;
  }
  Poly dx() const {
    Poly p;
    for (const auto& [e, k] : c) {
      if (e.first > 0) p.c[{e.first - 1, e.second}] += k * e.first;
    }
    return p;
  }
  Poly dy() const {
    Poly p;
    for (const auto& [e, k] : c) {
      if (e.second > 0) p.c[{e.first, e.second - 1}] += k * e.second;
    }
    return p;
  }
};

// Fixed, generic coefficients for every monomial of total degree <= degree.
Poly generic_poly(int degree, double seed) {
  Poly p;
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= total; ++b) {
      const int a = total - b;
      p.c[{a, b}] = std::sin(seed + 1.3 * a + 2.1 * b + 0.7 * a * b);
    }
  }
  return p;
}

}  // namespace

double manufactured_P(int k, const Vec2& x) { return generic_poly(k, 0.4)(x); }

AnalyticSolution manufactured(int k, double nu, double theta) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "manufactured solution needs k >= 0");
  const Poly psi = generic_poly(k + 2, 0.9);
  const Poly u1 = psi.dy();
  const Poly u2 = psi.dx();  // u = (psi_y, -psi_x)
  const Poly P = generic_poly(k, 0.4);
  const Poly u1x = u1.dx(), u1y = u1.dy(), u2x = u2.dx(), u2y = u2.dy();
  const Poly lap1 = u1x.dx(), lap1b = u1y.dy(), lap2 = u2x.dx(), lap2b = u2y.dy();
  const Poly Px = P.dx(), Py = P.dy();

  AnalyticSolution s;
  s.name = "manufactured";
  s.nu = nu;
  s.lo = Vec2(0.0, 0.0);
  s.hi = Vec2(1.0, 1.0);
  s.steady = true;
  s.velocity = [u1, u2](double, const Vec2& x) { return Vec2(u1(x), -u2(x)); };
  s.pressure = [P, u1, u2, theta](double, const Vec2& x) {
    return P(x) - 0.5 * theta * (u1(x) * u1(x) + u2(x) * u2(x));
  };
  // f = u.grad u - theta (grad u)^T u + grad P - nu Lap u
  s.forcing = [=](double, const Vec2& x) {
    const Vec2 u(u1(x), -u2(x));
    Mat2 G;
    G << u1x(x), u1y(x), -u2x(x), -u2y(x);
    const Vec2 lap(lap1(x) + lap1b(x), -(lap2(x) + lap2b(x)));
    return Vec2(G * u - theta * G.transpose() * u + Vec2(Px(x), Py(x)) - nu * lap);
  };
  auto vel = s.velocity;
  s.boundary = [vel](double t, const Vec2& x, int) { return vel(t, x); };
  return s;
}

}  // namespace dgflow
