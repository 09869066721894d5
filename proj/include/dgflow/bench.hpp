#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgflow/diagnostics.hpp"
#include "dgflow/solver.hpp"

namespace dgflow::bench {

enum class Scheme { dG1, dG2, Hdiv, dGtilde };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// One benchmark run: a case, a discretization, and the sweep lists. Every
/// combination k x mesh x tau is one sweep point.
struct CaseConfig {
  std::string case_name = "taylor_green";
  Scheme scheme = Scheme::dG2;
  std::optional<ConvectiveVariant> variant;  // overrides the scheme's form
  ViscousTensor tensor = ViscousTensor::Grad;
  double theta = 0.0;
  std::vector<int> k{0};
  std::vector<int> mesh_n{10};   // structured meshes, n x n squares
  std::string mesh;              // gmsh file; replaces mesh_n when set
  double gamma = 1000.0;
  double zeta = 1.0;
  double zeta_boundary = -1.0;
  double eta = -1.0;
  double nu = 0.01;
  std::vector<double> tau{0.01};
  double T = 0.5;
  NewtonConfig newton = NewtonConfig::transient();
  bool tighten_newton = false;
  std::string out = "out";
  int threads = 1;
  int output_every = 1;  // conservation log cadence, steps
  int vtu_every = 0;     // 0: final state only; negative: never
  BoundaryTime boundary_time = BoundaryTime::Average;
  bool allow_unstable = false;
  bool continuation = false;

  bool stationary() const;
  /// True for cases without a closed-form solution.
  bool qualitative() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Case defaults (mesh, viscosity, time grid, Newton tolerances).
CaseConfig default_config(const std::string& case_name);

/// Reads `key = value` lines; '#' starts a comment.
KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_key_values(const std::string& text);

/// Starts from the defaults of the `case` entry (last one wins) and applies
/// every other entry in order. Unknown keys throw InvalidConfig.
CaseConfig make_config(const KeyValues& entries);
void set_option(CaseConfig& c, const std::string& key, const std::string& value);

/// Rejects invalid combinations before any compute.
void validate(const CaseConfig& c);

FormParams form_params(const CaseConfig& c);
NewtonConfig newton_config(const CaseConfig& c);

/// Canonical key=value dump and its 64-bit FNV-1a hash.
std::string canonical(const CaseConfig& c);
std::uint64_t config_hash(const CaseConfig& c);

struct SweepPoint {
  int k = 0;
  int mesh_n = 0;  // 0 for file meshes
  double h_max = 0.0;
  int dof = 0;
  double tau = 0.0;  // 0 for stationary runs
  double l2_error = 0.0;
  std::optional<double> order;
  std::string status = "ok";
  std::string message;  // error text when status is not ok
  int steps = 0;
  int newton_iterations = 0;
  double energy_growth = 0.0;  // max relative one-step energy increase
  std::vector<ConservationRecord> records;
};

struct CaseResult {
  std::vector<SweepPoint> points;
};

/// log(e1/e2) / log(s1/s2) against the previous point with the same k, where
/// s is h_max when the mesh changed and tau when only tau changed.
void compute_orders(std::vector<SweepPoint>& points);

/// Runs every sweep point. Solver failures are recorded in `status` and the
/// sweep continues. Writes convergence.csv (appended), one conservation log
/// per transient point and VTU snapshots under c.out.
CaseResult run_case(const CaseConfig& c, const std::function<void(const SweepPoint&)>& on_point = {});

// Output helpers.

/// Six significant digits, '.' decimal point, locale independent.
std::string format_number(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_table(const Table& t, const std::filesystem::path& path);
/// Appends rows; writes the header first if the file is new or empty.
void append_table(const Table& t, const std::filesystem::path& path);
void append_log(const ConservationRecord& r, const std::filesystem::path& path);
std::vector<std::string> conservation_header();

struct VtuField {
  const Field* velocity = nullptr;
  const Field* pressure = nullptr;
  const Field* vorticity = nullptr;
};

/// ASCII UnstructuredGrid with one point per cell vertex. A null velocity
/// writes the grid with no point data.
void write_vtu(const Mesh& mesh, const VtuField& fields, const std::filesystem::path& path);

struct VtuData {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> cells;
  std::vector<std::pair<std::string, std::vector<double>>> arrays;  // flattened components

  const std::vector<double>* array(const std::string& name) const;
};

VtuData read_vtu(const std::filesystem::path& path);

}  // namespace dgflow::bench
