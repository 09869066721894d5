#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "dgflow/analytic.hpp"
#include "dgflow/bench.hpp"
#include "dgflow/error.hpp"

namespace dgflow::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_number(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string hex(std::uint64_t h) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, h, 16);
  std::string s(buf, p);
  return std::string(16 - s.size(), '0') + s;
}

const char* status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NewtonDiverged: return "newton_diverged";
    case ErrorCode::LinearSolveFailed: return "linear_solve_failed";
    case ErrorCode::DegenerateGeometry: return "degenerate_geometry";
    default: return "error";
  }
}

/// What a case needs besides the discretization.
struct Problem {
  std::optional<AnalyticSolution> exact;
  FlowData data;
  Vec2 lo = Vec2::Zero(), hi = Vec2::Ones();
  Vec2 origin = Vec2::Zero();  // angular momentum reference
  bool enclosed = false;       // no-penetration walls and no forcing
};

Problem make_problem(const CaseConfig& c, int k, const Mesh* mesh) {
  Problem p;
  const std::string& n = c.case_name;
  if (n == "gresho") {
    p.exact = gresho();
    p.enclosed = true;
  } else if (n == "taylor_green") {
    p.exact = taylor_green(c.nu);
  } else if (n == "kovasznay") {
    p.exact = kovasznay(c.nu);
  } else if (n == "kim_moin") {
    p.exact = kim_moin(c.nu);
  } else if (n == "manufactured") {
    p.exact = manufactured(k, c.nu, c.theta);
  } else if (n == "lid_driven") {
    p.lo = Vec2(0.0, 0.0);
    p.hi = Vec2(1.0, 1.0);
    if (mesh) p.data.boundary = lid_boundary(mesh->tag_id("top"));
  } else if (n == "cylinder") {
    if (mesh) p.data.boundary = cylinder_boundary(mesh->tag_id("inflow"), mesh->tag_id("outflow"));
  }
  if (p.exact) {
    p.data.forcing = p.exact->forcing;
    p.data.boundary = p.exact->boundary;
    p.lo = p.exact->lo;
    p.hi = p.exact->hi;
  }
  p.origin = 0.5 * (p.lo + p.hi);
  return p;
}

std::string point_tag(const SweepPoint& s) {
  std::string t = "k" + std::to_string(s.k) + (s.mesh_n ? "_n" + std::to_string(s.mesh_n) : "_file");
  if (s.tau > 0.0) t += "_tau" + short_number(s.tau);
  return t;
}

void snapshot(const Mesh& mesh, const Space& Q, const SolveState& s, double theta,
              const std::filesystem::path& path) {
  const Field w = vorticity(s.u, Q);
  const Field p = recover_kinematic_pressure(s.p, s.u, theta);
  write_vtu(mesh, {&s.u, &p, &w}, path);
}

void run_transient(const CaseConfig& c, const Problem& prob, const Mesh& mesh, const Space& V, const Space& Q,
                   FlowSolver& fs, SweepPoint& pt) {
  const double tau = pt.tau;
  const int steps = static_cast<int>(std::lround(c.T / tau));
  if (steps < 1 || std::abs(steps * tau - c.T) > 1e-9 * c.T) {
    throw Error(ErrorCode::InvalidConfig, "T = " + short_number(c.T) + " is not a multiple of tau = " + short_number(tau));
  }
  // An enclosed Hdiv flow starts exactly solenoidal: composite-rule
  // interpolation keeps the defect small and local, the projection removes it.
  const bool solenoidal = V.kind() == SpaceKind::Hdiv && prob.enclosed;
  const Field u0 = prob.exact ? project(V, [&](const Vec2& x) { return prob.exact->velocity(0.0, x); }, true,
                                        solenoidal ? 16 : 1)
                              : Field(V);
  SolveState s = fs.initial_state(solenoidal ? fs.solenoidal_projection(u0) : u0);
  const std::filesystem::path dir(c.out);
  const std::string tag = point_tag(pt);
  const auto log = dir / ("conservation_" + tag + ".csv");
  std::filesystem::create_directories(dir);
  std::filesystem::remove(log);

  auto record = [&] {
    ConservationRecord r = conservation_record(s.u, s.t, prob.origin);
    if (prob.exact) {
      const double t = s.t;
      r.l2_error = l2_error(s.u, [&](const Vec2& x) { return prob.exact->velocity(t, x); });
    }
    append_log(r, log);
    pt.records.push_back(r);
  };
  auto vtu = [&] {
    snapshot(mesh, Q, s, c.theta, dir / ("fields_" + tag + "_" + std::to_string(s.step) + ".vtu"));
  };

  record();
  if (c.vtu_every > 0) vtu();
  const double e0 = kinetic_energy(s.u);
  double e_prev = e0;
  const NewtonConfig newton = newton_config(c);
  for (int n = 0; n < steps; ++n) {
    fs.cn_step(s, tau, prob.data, newton, c.boundary_time);
    pt.newton_iterations += s.newton.iterations;
    ++pt.steps;
    const double e = kinetic_energy(s.u);
    if (e0 > 0.0) pt.energy_growth = std::max(pt.energy_growth, (e - e_prev) / e0);
    e_prev = e;
    if (!std::isfinite(e)) throw Error(ErrorCode::NewtonDiverged, "solution blew up at t = " + short_number(s.t));
    const bool last = n + 1 == steps;
    if (last || (n + 1) % c.output_every == 0) record();
    if (c.vtu_every > 0 ? (last || (n + 1) % c.vtu_every == 0) : (last && c.vtu_every == 0)) vtu();
  }
  pt.l2_error = prob.exact ? *pt.records.back().l2_error : kNaN;
}

void run_stationary(const CaseConfig& c, const Problem& prob, const Mesh& mesh, const Space& Q, FlowSolver& fs,
                    SweepPoint& pt) {
  StationaryPolicy policy;
  policy.continuation = c.continuation;
  SolveState s = fs.solve_stationary(prob.data, newton_config(c), policy);
  pt.newton_iterations = s.newton.iterations;
  pt.l2_error = prob.exact ? l2_error(s.u, [&](const Vec2& x) { return prob.exact->velocity(0.0, x); }) : kNaN;
  ConservationRecord r = conservation_record(s.u, 0.0, prob.origin);
  if (prob.exact) r.l2_error = pt.l2_error;
  pt.records.push_back(r);
  if (c.vtu_every >= 0) snapshot(mesh, Q, s, c.theta, std::filesystem::path(c.out) / ("fields_" + point_tag(pt) + ".vtu"));
}

}  // namespace

void compute_orders(std::vector<SweepPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepPoint& b = points[i];
    b.order.reset();
    if (!(b.l2_error > 0.0) || !std::isfinite(b.l2_error)) continue;
    for (std::size_t j = i; j-- > 0;) {
      const SweepPoint& a = points[j];
      if (a.k != b.k) continue;
      const bool same_h = a.h_max == b.h_max, same_tau = a.tau == b.tau;
      if (same_h == same_tau) continue;
      if (a.l2_error > 0.0 && std::isfinite(a.l2_error)) {
        const double ratio = same_tau ? a.h_max / b.h_max : a.tau / b.tau;
        b.order = std::log(a.l2_error / b.l2_error) / std::log(ratio);
      }
      break;
    }
  }
}

CaseResult run_case(const CaseConfig& c, const std::function<void(const SweepPoint&)>& on_point) {
  validate(c);
  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  const std::uint64_t hash = config_hash(c);
  {
    std::ofstream cfg(dir / ("config_" + hex(hash) + ".txt"));
    cfg << canonical(c);
  }

  std::unique_ptr<Mesh> file_mesh;
  if (!c.mesh.empty()) file_mesh = std::make_unique<Mesh>(import_gmsh(c.mesh));
  const std::vector<int> meshes = c.mesh.empty() ? c.mesh_n : std::vector<int>{0};
  const std::vector<double> taus = c.stationary() ? std::vector<double>{0.0} : c.tau;
  const FormParams params = form_params(c);

  CaseResult result;
  for (int k : c.k) {
    for (int n : meshes) {
      std::unique_ptr<Mesh> own;
      const Mesh* mesh = file_mesh.get();
      if (!mesh) {
        const Problem shape = make_problem(c, k, nullptr);
        own = std::make_unique<Mesh>(generate_rectangle(shape.lo, shape.hi, n, n));
        mesh = own.get();
      }
      const double h = mesh_stats(*mesh).h_max;
      for (double tau : taus) {
        SweepPoint pt;
        pt.k = k;
        pt.mesh_n = n;
        pt.h_max = h;
        pt.tau = tau;
        pt.l2_error = kNaN;
        try {
          const Problem prob = make_problem(c, k, mesh);
          const Space V(*mesh, c.scheme == Scheme::Hdiv ? SpaceKind::Hdiv : SpaceKind::DgVector, k);
          const Space Q(*mesh, SpaceKind::DgScalar, k);
          FlowSolver fs(V, Q, params);
          pt.dof = fs.n_total();
          if (c.stationary()) {
            run_stationary(c, prob, *mesh, Q, fs, pt);
          } else {
            run_transient(c, prob, *mesh, V, Q, fs, pt);
          }
        } catch (const Error& e) {
          if (e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::Io) throw;
          pt.status = status_of(e.code());
          pt.message = e.what();
          pt.l2_error = kNaN;
        }
        result.points.push_back(std::move(pt));
        compute_orders(result.points);
        if (on_point) on_point(result.points.back());
      }
    }
  }

  if (!c.qualitative()) {
    Table t;
    t.header = {"k", "h_max", "dof", "L2_error", "observed_order", "tau", "status", "config_hash"};
    for (const auto& p : result.points) {
      t.rows.push_back({std::to_string(p.k), format_number(p.h_max), std::to_string(p.dof),
                        format_number(p.l2_error), p.order ? format_number(*p.order) : std::string(),
                        format_number(p.tau), p.status, hex(hash)});
    }
    append_table(t, dir / "convergence.csv");
  }
  return result;
}

}  // namespace dgflow::bench
