#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dgflow/bench.hpp"
#include "dgflow/error.hpp"

namespace dgflow::bench {

namespace {

const char* const kCases[] = {"gresho",   "taylor_green", "kovasznay",   "kim_moin",
                              "cylinder", "lid_driven",   "manufactured"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& want) {
  throw Error(ErrorCode::InvalidConfig, "invalid value '" + value + "' for '" + key + "': expected " + want);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) bad_value(key, v, "a number");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) bad_value(key, v, "an integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class Conv>
std::vector<T> to_list(const std::string& key, const std::string& v, Conv conv) {
  std::vector<T> out;
  for (const auto& s : split_list(v)) out.push_back(conv(key, s));
  if (out.empty()) bad_value(key, v, "a comma separated list");
  return out;
}

bool is_int_list(const std::string& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
    return std::isdigit(c) || c == ',' || c == ' ';
  });
}

std::string num(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::dG1: return "dG1";
    case Scheme::dG2: return "dG2";
    case Scheme::Hdiv: return "Hdiv";
    case Scheme::dGtilde: return "dGtilde";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  const std::string l = lower(s);
  if (l == "dg1") return Scheme::dG1;
  if (l == "dg2") return Scheme::dG2;
  if (l == "hdiv") return Scheme::Hdiv;
  if (l == "dgtilde") return Scheme::dGtilde;
  throw Error(ErrorCode::InvalidConfig, "unknown scheme '" + s + "' (dG1, dG2, Hdiv, dGtilde)");
}

bool CaseConfig::stationary() const {
  return case_name == "kovasznay" || case_name == "lid_driven" || case_name == "manufactured";
}

bool CaseConfig::qualitative() const { return case_name == "cylinder" || case_name == "lid_driven"; }

CaseConfig default_config(const std::string& name) {
  CaseConfig c;
  c.case_name = name;
  if (name == "gresho") {
    c.scheme = Scheme::Hdiv;
    c.k = {1};
    c.mesh_n = {50};
    c.gamma = 0.0;
    c.zeta = 0.5;
    c.nu = 0.0;
    c.tau = {0.01};
    c.T = 10.0;
  } else if (name == "taylor_green") {
    c.mesh_n = {10, 20, 40};
  } else if (name == "kovasznay") {
    c.nu = 0.025;
    c.mesh_n = {10, 20, 40};
    c.newton = NewtonConfig::stationary();
  } else if (name == "kim_moin") {
    c.theta = 1.0;
    c.k = {1};
    c.mesh_n = {50};
    c.nu = 0.1;
    c.tau = {0.08, 0.04, 0.02, 0.01};
    c.T = 0.8;
  } else if (name == "cylinder") {
    c.scheme = Scheme::dG1;
    c.theta = 1.0;
    c.k = {1};
    c.mesh = "meshes/cylinder.msh";
    c.nu = 0.001;
    c.tau = {0.01};
    c.T = 8.0;
    c.output_every = 10;
    c.vtu_every = 50;
  } else if (name == "lid_driven") {
    c.scheme = Scheme::dG1;
    c.theta = 1.0;
    c.k = {3};
    c.mesh_n = {50};
    c.nu = 1.0 / 400.0;
    c.newton = NewtonConfig::stationary();
  } else if (name == "manufactured") {
    c.k = {1};
    c.mesh_n = {4};
    c.nu = 1.0;
    c.newton = NewtonConfig::stationary();
  } else {
    std::string list;
    for (const char* n : kCases) list += std::string(list.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::InvalidConfig, "unknown case '" + name + "' (" + list + ")");
  }
  return c;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(n) + ": expected key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void set_option(CaseConfig& c, const std::string& key, const std::string& v) {
  if (key == "case") {
    if (v != c.case_name) throw Error(ErrorCode::InvalidConfig, "case must be set before other options");
  } else if (key == "scheme") {
    c.scheme = parse_scheme(v);
  } else if (key == "variant") {
    c.variant = parse_variant(v);
  } else if (key == "tensor") {
    c.tensor = parse_tensor(v);
  } else if (key == "theta") {
    c.theta = to_double(key, v);
  } else if (key == "k") {
    c.k = to_list<int>(key, v, to_int);
  } else if (key == "mesh_n") {
    c.mesh_n = to_list<int>(key, v, to_int);
    c.mesh.clear();
  } else if (key == "mesh") {
    if (is_int_list(v)) {
      c.mesh_n = to_list<int>(key, v, to_int);
      c.mesh.clear();
    } else {
      c.mesh = v;
    }
  } else if (key == "gamma") {
    c.gamma = to_double(key, v);
  } else if (key == "zeta") {
    c.zeta = to_double(key, v);
  } else if (key == "zeta_boundary") {
    c.zeta_boundary = to_double(key, v);
  } else if (key == "eta") {
    c.eta = to_double(key, v);
  } else if (key == "nu") {
    c.nu = to_double(key, v);
  } else if (key == "tau") {
    c.tau = to_list<double>(key, v, to_double);
  } else if (key == "T") {
    c.T = to_double(key, v);
  } else if (key == "newton_atol") {
    c.newton.atol = to_double(key, v);
  } else if (key == "newton_rtol") {
    c.newton.rtol = to_double(key, v);
  } else if (key == "newton_max_it") {
    c.newton.max_iterations = to_int(key, v);
  } else if (key == "tighten_newton") {
    c.tighten_newton = to_bool(key, v);
  } else if (key == "out") {
    c.out = v;
  } else if (key == "threads") {
    c.threads = to_int(key, v);
  } else if (key == "output_every") {
    c.output_every = to_int(key, v);
  } else if (key == "vtu_every") {
    c.vtu_every = to_int(key, v);
  } else if (key == "boundary_time") {
    const std::string l = lower(v);
    if (l == "average") {
      c.boundary_time = BoundaryTime::Average;
    } else if (l == "midpoint") {
      c.boundary_time = BoundaryTime::Midpoint;
    } else {
      bad_value(key, v, "average or midpoint");
    }
  } else if (key == "allow_unstable") {
    c.allow_unstable = to_bool(key, v);
  } else if (key == "continuation") {
    c.continuation = to_bool(key, v);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown option '" + key + "'");
  }
}

CaseConfig make_config(const KeyValues& entries) {
  std::string name = "taylor_green";
  for (const auto& [k, v] : entries) {
    if (k == "case") name = v;
  }
  CaseConfig c = default_config(name);
  for (const auto& [k, v] : entries) {
    if (k != "case") set_option(c, k, v);
  }
  return c;
}

FormParams form_params(const CaseConfig& c) {
  FormParams p;
  p.theta = c.theta;
  p.zeta = c.zeta;
  p.zeta_boundary = c.zeta_boundary;
  p.gamma = c.gamma;
  p.eta = c.eta;
  // Taylor-Green and Gresho are Euler runs; the viscous decay of Taylor-Green
  // enters through the forcing.
  p.nu = (c.case_name == "taylor_green" || c.case_name == "gresho") ? 0.0 : c.nu;
  p.tensor = c.tensor;
  p.allow_unstable = c.allow_unstable;
  p.threads = c.threads;
  switch (c.scheme) {
    case Scheme::dG1: p.variant = ConvectiveVariant::C1; break;
    case Scheme::dG2: p.variant = ConvectiveVariant::C2; break;
    case Scheme::Hdiv: p.variant = ConvectiveVariant::C2; break;
    case Scheme::dGtilde: p.variant = ConvectiveVariant::CTilde; break;
  }
  if (c.variant) p.variant = *c.variant;
  return p;
}

NewtonConfig newton_config(const CaseConfig& c) {
  return c.tighten_newton ? NewtonConfig::tightened() : c.newton;
}

void validate(const CaseConfig& c) {
  default_config(c.case_name);  // case name check
  if (c.scheme == Scheme::Hdiv && c.case_name == "cylinder") {
    throw Error(ErrorCode::InvalidConfig,
                "the Hdiv scheme cannot run the cylinder case: in/outflow needs full Dirichlet data");
  }
  if (c.k.empty()) throw Error(ErrorCode::InvalidConfig, "k list is empty");
  const int kmax = c.scheme == Scheme::Hdiv ? 2 : 3;
  for (int k : c.k) {
    if (k < 0 || k > kmax) {
      throw Error(ErrorCode::InvalidConfig, "k = " + std::to_string(k) + " outside [0, " +
                                                std::to_string(kmax) + "] for " + to_string(c.scheme));
    }
  }
  if (c.mesh.empty()) {
    if (c.mesh_n.empty()) throw Error(ErrorCode::InvalidConfig, "mesh_n list is empty");
    for (int n : c.mesh_n) {
      if (n < 1) throw Error(ErrorCode::InvalidConfig, "mesh_n entries must be >= 1");
    }
  } else if (!std::filesystem::exists(c.mesh)) {
    throw Error(ErrorCode::Io, "mesh file not found: " + c.mesh);
  }
  if (c.case_name == "cylinder" && c.mesh.empty()) {
    throw Error(ErrorCode::InvalidConfig, "the cylinder case needs a mesh file");
  }
  if (!c.stationary()) {
    if (c.tau.empty()) throw Error(ErrorCode::InvalidConfig, "tau list is empty");
    for (double t : c.tau) {
      if (!(t > 0.0)) throw Error(ErrorCode::InvalidConfig, "tau must be > 0");
    }
    if (!(c.T > 0.0)) throw Error(ErrorCode::InvalidConfig, "T must be > 0");
  }
  const bool needs_nu = c.case_name != "gresho";
  if (needs_nu && !(c.nu > 0.0)) throw Error(ErrorCode::InvalidConfig, "nu must be > 0 for " + c.case_name);
  if (c.threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
  if (c.output_every < 1) throw Error(ErrorCode::InvalidConfig, "output_every must be >= 1");
  const NewtonConfig n = newton_config(c);
  if (!(n.atol > 0.0) || !(n.rtol > 0.0) || n.max_iterations < 1) {
    throw Error(ErrorCode::InvalidConfig, "Newton tolerances must be > 0 and max iterations >= 1");
  }
  check_params(form_params(c), c.scheme == Scheme::Hdiv ? SpaceKind::Hdiv : SpaceKind::DgVector);
}

std::string canonical(const CaseConfig& c) {
  auto list = [](const auto& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + num(static_cast<double>(x));
    return s;
  };
  const NewtonConfig n = newton_config(c);
  std::ostringstream out;
  out << "case=" << c.case_name << "\nscheme=" << to_string(c.scheme)
      << "\nvariant=" << to_string(form_params(c).variant) << "\ntensor=" << to_string(c.tensor)
      << "\ntheta=" << num(c.theta) << "\nk=" << list(c.k) << "\nmesh_n=" << list(c.mesh_n)
      << "\nmesh=" << c.mesh << "\ngamma=" << num(c.gamma) << "\nzeta=" << num(c.zeta)
      << "\nzeta_boundary=" << num(c.zeta_boundary) << "\neta=" << num(c.eta) << "\nnu=" << num(c.nu)
      << "\ntau=" << list(c.tau) << "\nT=" << num(c.T) << "\nnewton_atol=" << num(n.atol)
      << "\nnewton_rtol=" << num(n.rtol) << "\nnewton_max_it=" << n.max_iterations
      << "\nboundary_time=" << (c.boundary_time == BoundaryTime::Average ? "average" : "midpoint")
      << "\nallow_unstable=" << c.allow_unstable << "\ncontinuation=" << c.continuation << "\n";
  return out.str();
}

std::uint64_t config_hash(const CaseConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace dgflow::bench
