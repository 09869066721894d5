// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dgflow/analytic.hpp"
#include "dgflow/bench.hpp"
#include "dgflow/diagnostics.hpp"
#include "dgflow/solver.hpp"
#include "oracle.hpp"

using namespace dgflow;
using namespace dgflow::bench;

namespace {

std::filesystem::path g_out = std::filesystem::temp_directory_path() / "dgflow_acceptance";

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    detail << "  " << (cond ? "ok   " : "MISS ") << what << "\n";
    ok = ok && cond;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool within(double value, double ref, double rel) { return std::abs(value - ref) <= rel * std::abs(ref); }

void check_value(Criterion& c, const std::string& label, double value, double ref, double rel = 0.10) {
  c.check(within(value, ref, rel), label + " = " + num(value) + " (target " + num(ref) + " +-" + num(100 * rel) + "%)");
}

void check_order(Criterion& c, const std::string& label, const std::optional<double>& order, double ref) {
  const double o = order.value_or(std::nan(""));
  c.check(order && std::abs(o - ref) <= 0.15, label + " order = " + num(o) + " (target " + num(ref) + " +-0.15)");
}

CaseResult sweep(CaseConfig c, const std::string& tag) {
  c.out = (g_out / tag).string();
  c.vtu_every = -1;
  std::filesystem::remove_all(c.out);
  const CaseResult r = run_case(c);
  for (const auto& p : r.points) {
    if (p.status != "ok") std::cerr << "  " << tag << ": " << p.status << " " << p.message << "\n";
  }
  return r;
}

bool all_ok(const CaseResult& r) {
  return std::all_of(r.points.begin(), r.points.end(), [](const SweepPoint& p) { return p.status == "ok"; });
}

// Taylor-Green, dG2, k = 0 on three meshes and k = 1 on two, every theta.
void taylor_green_convergence(Criterion& c) {
  for (double theta : {0.0, 1.0, -1.0}) {
    CaseConfig cfg = default_config("taylor_green");
    cfg.theta = theta;
    cfg.k = {0};
    cfg.mesh_n = {10, 20, 40};
    const CaseResult r0 = sweep(cfg, "tgv_k0");
    cfg.k = {1};
    cfg.mesh_n = {10, 20};
    const CaseResult r1 = sweep(cfg, "tgv_k1");
    const std::string t = "theta=" + num(theta);
    c.check(all_ok(r0) && all_ok(r1), t + " all runs converged");
    if (r0.points.size() != 3 || r1.points.size() != 2) continue;
    const double e0[] = {2.02e-1, 4.44e-2, 1.03e-2};
    for (int i = 0; i < 3; ++i) check_value(c, t + " k=0 h=" + num(r0.points[i].h_max) + " error", r0.points[i].l2_error, e0[i]);
    check_order(c, t + " k=0 h=" + num(r0.points[1].h_max), r0.points[1].order, 2.18);
    check_order(c, t + " k=0 h=" + num(r0.points[2].h_max), r0.points[2].order, 2.11);
    check_value(c, t + " k=1 h=" + num(r1.points[0].h_max) + " error", r1.points[0].l2_error, 2.04e-2);
    check_value(c, t + " k=1 h=" + num(r1.points[1].h_max) + " error", r1.points[1].l2_error, 3.05e-3);
    check_order(c, t + " k=1 h=" + num(r1.points[1].h_max), r1.points[1].order, 2.74);
  }
}

void kovasznay_convergence(Criterion& c) {
  CaseConfig cfg = default_config("kovasznay");
  cfg.k = {0};
  cfg.mesh_n = {10, 20, 40};
  const CaseResult r0 = sweep(cfg, "kov_k0");
  cfg.k = {1};
  cfg.mesh_n = {10, 20};
  const CaseResult r1 = sweep(cfg, "kov_k1");
  c.check(all_ok(r0) && all_ok(r1), "all runs converged");
  if (r0.points.size() != 3 || r1.points.size() != 2) return;
  const double e0[] = {9.26e-2, 2.40e-2, 6.13e-3};
  for (int i = 0; i < 3; ++i) check_value(c, "k=0 h=" + num(r0.points[i].h_max) + " error", r0.points[i].l2_error, e0[i]);
  check_value(c, "k=1 h=" + num(r1.points[1].h_max) + " error", r1.points[1].l2_error, 1.35e-3);
  check_order(c, "k=1 h=" + num(r1.points[1].h_max), r1.points[1].order, 3.01);
}

void temporal_order(Criterion& c) {
  CaseConfig cfg = default_config("kim_moin");
  cfg.mesh_n = {50};
  cfg.tau = {0.08, 0.04, 0.02};
  cfg.output_every = 10;
  const CaseResult r = sweep(cfg, "kim_moin");
  c.check(all_ok(r), "all runs converged");
  if (r.points.size() != 3) return;
  const double ref[] = {1.19e-3, 2.55e-4, 6.42e-5};
  for (int i = 0; i < 3; ++i) check_value(c, "tau=" + num(r.points[i].tau) + " error", r.points[i].l2_error, ref[i]);
  check_order(c, "tau 0.08->0.04", r.points[1].order, 2.23);
  check_order(c, "tau 0.04->0.02", r.points[2].order, 1.99);
}

double single_error(CaseConfig cfg, const std::string& tag, bool& ok) {
  const CaseResult r = sweep(cfg, tag);
  ok = ok && all_ok(r) && r.points.size() == 1;
  return r.points.empty() ? std::nan("") : r.points[0].l2_error;
}

void gamma_study(Criterion& c) {
  bool ok = true;
  CaseConfig tgv = default_config("taylor_green");
  tgv.scheme = Scheme::dG1;
  tgv.theta = 1.0;
  tgv.k = {1};
  tgv.mesh_n = {20};
  tgv.gamma = 1.0;
  const double t1 = single_error(tgv, "gamma_tgv_1", ok);
  tgv.gamma = 1000.0;
  const double t1000 = single_error(tgv, "gamma_tgv_1000", ok);
  CaseConfig kov = default_config("kovasznay");
  kov.scheme = Scheme::dG1;
  kov.theta = 1.0;
  kov.k = {1};
  kov.mesh_n = {20};
  kov.gamma = 1000.0;
  const double k1000 = single_error(kov, "gamma_kov_1000", ok);
  kov.gamma = 1.0;
  const double k1 = single_error(kov, "gamma_kov_1", ok);
  c.check(ok, "all runs converged");
  c.check(t1 / t1000 > 30.0, "TGV error(gamma=1) / error(gamma=1e3) = " + num(t1) + " / " + num(t1000) + " = " +
                                 num(t1 / t1000) + " (target > 30)");
  check_value(c, "Kovasznay error(gamma=1e3)", k1000, 1.35e-3);
  c.check(k1 > 3e-3, "Kovasznay error(gamma=1) = " + num(k1) + " (target > 3e-3)");
}

CaseConfig gresho_config(double zeta) {
  CaseConfig cfg = default_config("gresho");
  cfg.mesh_n = {25};
  cfg.T = 1.0;
  cfg.zeta = zeta;
  cfg.output_every = 1;
  return cfg;
}

const CaseResult& gresho_run(double zeta) {
  static std::map<double, CaseResult> cache;
  auto it = cache.find(zeta);
  if (it == cache.end()) it = cache.emplace(zeta, sweep(gresho_config(zeta), "gresho_zeta" + num(zeta))).first;
  return it->second;
}

void gresho_energy(Criterion& c) {
  const CaseResult& central = gresho_run(0.0);
  const CaseResult& upwind = gresho_run(0.5);
  c.check(all_ok(central) && all_ok(upwind) && !central.points.empty() && !upwind.points.empty(), "both runs completed");
  if (central.points.empty() || upwind.points.empty()) return;
  const auto& rc = central.points[0].records;
  const auto& ru = upwind.points[0].records;
  c.check(rc.size() == 101 && ru.size() == 101, "a record per step");
  double drift = 0.0;
  for (const auto& r : rc) drift = std::max(drift, std::abs(r.energy - rc[0].energy) / rc[0].energy);
  c.check(drift < 1e-8, "central max |E(t)-E(0)|/E(0) = " + num(drift) + " (target < 1e-8)");
  double rise = -INFINITY;
  for (std::size_t i = 1; i < ru.size(); ++i) rise = std::max(rise, ru[i].energy - ru[i - 1].energy);
  c.check(rise <= 0.0, "upwind max E(t_{n+1}) - E(t_n) = " + num(rise) + " (target <= 0)");
  const double drop = (ru[0].energy - ru.back().energy) / ru[0].energy;
  c.check(drop >= 0.0 && drop < 1e-3, "upwind relative energy drop = " + num(drop) + " (target < 1e-3)");
}

void gresho_momentum(Criterion& c) {
  for (double zeta : {0.0, 0.5}) {
    const CaseResult& r = gresho_run(zeta);
    const std::string t = zeta == 0.0 ? "central" : "upwind";
    if (r.points.empty() || r.points[0].status != "ok") {
      c.check(false, t + " run completed");
      continue;
    }
    const auto& rec = r.points[0].records;
    double dm = 0.0, da = 0.0;
    for (std::size_t i = 1; i < rec.size(); ++i) {
      dm = std::max({dm, std::abs(rec[i].momentum.x() - rec[i - 1].momentum.x()),
                     std::abs(rec[i].momentum.y() - rec[i - 1].momentum.y())});
      da = std::max(da, std::abs(rec[i].angular_momentum - rec[0].angular_momentum) / std::abs(rec[0].angular_momentum));
    }
    c.check(dm < 1e-8, t + " max per-step |d(int u_i)| = " + num(dm) + " (target < 1e-8)");
    const double bound = zeta == 0.0 ? 0.05 : 1e-6;
    c.check(da < bound, t + " angular momentum relative drift = " + num(da) + " (target < " + num(bound) + ")");
  }
}

// Random smooth divergence-free-ish data: a few Fourier modes of a stream
// function plus a random gradient part.
VectorFunction random_smooth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<std::array<double, 4>> modes;
  for (int i = 0; i < 4; ++i) modes.push_back({d(rng), d(rng), 1 + 3 * std::abs(d(rng)), 1 + 3 * std::abs(d(rng))});
  const double c0 = d(rng), c1 = d(rng);
  return [modes, c0, c1](const Vec2& x) {
    Vec2 u(c0, c1);
    for (const auto& m : modes) {
      u.x() += m[0] * std::cos(m[2] * x.x() + m[3] * x.y() + m[1]);
      u.y() += m[1] * std::sin(m[3] * x.x() - m[2] * x.y() + m[0]);
    }
    return u;
  };
}

void discrete_stability(Criterion& c) {
  const Mesh m = generate_rectangle(Vec2(0, 0), Vec2(1, 1), 4, 4);
  std::mt19937_64 rng(2024);
  const double thetas[] = {0.0, 1.0, -1.0};
  double worst = -INFINITY;
  int failures = 0;
  for (int run = 0; run < 20; ++run) {
    const double theta = thetas[run % 3];
    const bool dg1 = (run / 3) % 2 == 0;
    const int k = run % 2;
    const Space V(m, SpaceKind::DgVector, k);
    const Space Q(m, SpaceKind::DgScalar, k);
    FormParams p;
    p.variant = dg1 ? ConvectiveVariant::C1 : ConvectiveVariant::C2;
    p.theta = theta;
    p.zeta = 0.0;
    p.zeta_boundary = 0.5 * std::abs(1.0 - theta);
    p.gamma = dg1 ? 1.0 : 1000.0;
    p.nu = 0.0;
    FlowSolver solver(V, Q, p);
    SolveState st = solver.initial_state(project(V, random_smooth(rng)));
    double norm = std::sqrt(2.0 * kinetic_energy(st.u));
    try {
      for (int step = 0; step < 10; ++step) {
        solver.cn_step(st, 0.05, {}, NewtonConfig::tightened());
        const double next = std::sqrt(2.0 * kinetic_energy(st.u));
        worst = std::max(worst, next - norm);
        if (next > norm + 1e-10) ++failures;
        norm = next;
      }
    } catch (const Error& e) {
      ++failures;
      c.detail << "  run " << run << ": " << e.what() << "\n";
    }
  }
  c.check(failures == 0, "20 runs x 10 steps, max ||u^{n+1}|| - ||u^n|| = " + num(worst) + " (target <= 1e-10), violations " +
                             std::to_string(failures));
}

Mesh skewed_mesh(int n) {
  Mesh base = generate_rectangle(Vec2(0, 0), Vec2(1, 1), n, n);
  std::vector<Vec2> v = base.vertices();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.25 / n, 0.25 / n);
  for (auto& x : v) {
    if (x.x() > 1e-12 && x.x() < 1 - 1e-12 && x.y() > 1e-12 && x.y() < 1 - 1e-12) x += Vec2(d(rng), d(rng));
  }
  return Mesh(v, base.cells(), base.boundary_edges(), base.tag_names());
}

// Random field scaled to unit L2 norm; the identities are homogeneous, so the
// absolute tolerance applies at a fixed scale.
Field unit_field(Field f) {
  f.coeffs /= std::sqrt(2.0 * kinetic_energy(f));
  return f;
}

FormParams floor_params(ConvectiveVariant v, double theta, double zeta) {
  FormParams p;
  p.variant = v;
  p.theta = theta;
  p.zeta = zeta;
  p.zeta_boundary = 0.5 * std::abs(1.0 - theta);
  return p;
}

void form_identities(Criterion& c) {
  const Mesh m = skewed_mesh(2);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uz(0.0, 1.0);
  const ConvectiveVariant rot[] = {ConvectiveVariant::C1, ConvectiveVariant::C2};
  const double thetas[] = {-1.0, 0.0, 1.0};
  const int n = 1000;

  double min_c = INFINITY;
  double id_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i % 2;
    const Space V(m, SpaceKind::DgVector, k);
    const double theta = thetas[(i / 2) % 3];
    const FormParams p = floor_params(rot[(i / 6) % 2], theta, uz(rng));
    const FormAssembler f(V, nullptr, p);
    const Field v = unit_field(oracle::random_field(V, rng));
    const double cv = f.convective_residual(v.coeffs).dot(v.coeffs);
    min_c = std::min(min_c, cv);
    id_err = std::max(id_err, std::abs(cv - oracle::energy_identity(v, p, theta)));
    // c_h^0(v; v, v) with its own upwind form.
    FormParams p0 = p;
    p0.variant = ConvectiveVariant::C0;
    p0.zeta_boundary = std::max(0.5, p.zeta_boundary);
    const FormAssembler f0(V, nullptr, p0);
    id_err = std::max(id_err, std::abs(f0.convective_value(v.coeffs, v.coeffs, v.coeffs) - oracle::energy_identity(v, p0, 0.0, &v)));
  }
  c.check(id_err <= 1e-12, std::to_string(n) + " fields: energy identity C0/C1/C2 max error " + num(id_err) + " (target 1e-12)");

  double rot_err = 0.0;
  double ibp_err = 0.0;
  {
    const Space H0(m, SpaceKind::Hdiv, 0), H1(m, SpaceKind::Hdiv, 1);
    const Space Q0(m, SpaceKind::DgScalar, 0), Q1(m, SpaceKind::DgScalar, 1);
    for (int i = 0; i < n; ++i) {
      const Space& H = i % 2 ? H1 : H0;
      const Space& Q = i % 2 ? Q1 : Q0;
      const double theta = thetas[(i / 2) % 3];
      const double zeta = uz(rng);
      const FormAssembler f1(H, nullptr, floor_params(ConvectiveVariant::C1, theta, zeta));
      const FormAssembler f2(H, nullptr, floor_params(ConvectiveVariant::C2, theta, zeta));
      const Field u = unit_field(oracle::random_solenoidal(H, Q, rng)), v = unit_field(oracle::random_solenoidal(H, Q, rng));
      min_c = std::min({min_c, f1.convective_residual(u.coeffs).dot(u.coeffs), f2.convective_residual(u.coeffs).dot(u.coeffs)});
      rot_err = std::max(rot_err, std::abs((f1.convective_residual(u.coeffs) - f2.convective_residual(u.coeffs)).dot(v.coeffs)));
      const Field a = unit_field(oracle::random_field(H, rng, true)), b = unit_field(oracle::random_field(H, rng, true));
      ibp_err = std::max(ibp_err, std::abs(oracle::hdiv_identity(a, b)));
    }
  }
  c.check(min_c >= -1e-12, std::to_string(2 * n) + " DG and Hdiv fields: min c_h(v; v, v) = " + num(min_c) + " (target >= -1e-12)");
  c.check(rot_err <= 1e-12, std::to_string(n) + " solenoidal Hdiv fields: |C1 - C2| max " + num(rot_err) + " (target 1e-12)");
  c.check(ibp_err <= 1e-12, std::to_string(n) + " Hdiv fields: integration-by-parts identity max error " + num(ibp_err) +
                                " (target 1e-12)");
}

void jacobian_check(Criterion& c) {
  const Mesh m = skewed_mesh(3);
  std::mt19937_64 rng(123);
  double worst = 0.0;
  int cases = 0;
  for (SpaceKind kind : {SpaceKind::DgVector, SpaceKind::Hdiv}) {
    for (int k : {0, 1, 2}) {
      const Space V(m, kind, k);
      for (auto variant : {ConvectiveVariant::C0, ConvectiveVariant::C1, ConvectiveVariant::C2, ConvectiveVariant::CTilde}) {
        for (double theta : {-1.0, 0.0, 1.0}) {
          FormParams p = floor_params(variant, theta, 0.8);
          p.zeta_boundary = std::max(p.zeta_boundary, 0.5);
          const FormAssembler f(V, nullptr, p);
          for (int trial = 0; trial < 3; ++trial) {
            const Field u = oracle::random_field(V, rng), d = oracle::random_field(V, rng);
            const double eps = 1e-6;
            const Eigen::VectorXd up = u.coeffs + eps * d.coeffs, um = u.coeffs - eps * d.coeffs;
            const Eigen::VectorXd fd =
                (f.convective_residual(up, nullptr, &u.coeffs) - f.convective_residual(um, nullptr, &u.coeffs)) / (2 * eps);
            const Eigen::VectorXd jd = f.convective_jacobian(u.coeffs) * d.coeffs;
            worst = std::max(worst, (fd - jd).norm() / jd.norm());
            ++cases;
          }
        }
      }
    }
  }
  c.check(worst < 1e-6, std::to_string(cases) + " random states, max relative FD error " + num(worst) + " (target < 1e-6)");
}

void manufactured_exactness(Criterion& c) {
  for (int k : {0, 1, 2}) {
    for (double theta : {-1.0, 0.0, 1.0}) {
      CaseConfig cfg = default_config("manufactured");
      cfg.k = {k};
      cfg.theta = theta;
      cfg.mesh_n = {3};
      const CaseResult r = sweep(cfg, "manufactured");
      const double e = r.points.empty() ? std::nan("") : r.points[0].l2_error;
      c.check(all_ok(r) && e < 1e-9, "k=" + std::to_string(k) + " theta=" + num(theta) + " error " + num(e) + " (target < 1e-9)");
    }
  }
}

struct Entry {
  int id;
  std::string name;
  std::function<void(Criterion&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  std::filesystem::create_directories(g_out);

  const std::vector<Entry> entries = {
      {1, "Taylor-Green spatial convergence (dG2)", taylor_green_convergence},
      {2, "Kovasznay steady convergence (dG2)", kovasznay_convergence},
      {3, "Kim-Moin temporal order", temporal_order},
      {4, "gamma study direction (dG1)", gamma_study},
      {5, "Gresho energy conservation and dissipation", gresho_energy},
      {6, "Gresho momentum and angular momentum", gresho_momentum},
      {7, "fully discrete energy stability", discrete_stability},
      {8, "convective form identities", form_identities},
      {9, "convective Jacobian vs finite differences", jacobian_check},
      {10, "manufactured steady solution exactness (dG2)", manufactured_exactness},
  };
  int failed = 0;
  for (const auto& e : entries) {
    if (!only.empty() && std::find(only.begin(), only.end(), e.id) == only.end()) continue;
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(c);
    } catch (const std::exception& ex) {
      c.check(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << e.id << ": " << e.name << " [" << num(secs) << " s]\n"
              << c.detail.str() << std::flush;
    if (!c.ok) ++failed;
  }
  return failed;
}
