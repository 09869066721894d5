#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dgflow/bench.hpp"
#include "dgflow/error.hpp"

namespace dgflow::bench {

namespace {

const Vec2 kRefVertex[3] = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

std::string exact(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void data_array(std::ostream& out, const std::string& name, int components, const std::vector<double>& v) {
  out << "        <DataArray type=\"Float64\" Name=\"" << name << "\" NumberOfComponents=\"" << components
      << "\" format=\"ascii\">\n         ";
  for (std::size_t i = 0; i < v.size(); ++i) out << ' ' << exact(v[i]);
  out << "\n        </DataArray>\n";
}

std::string attribute(const std::string& tag, const std::string& key) {
  const auto p = tag.find(key + "=\"");
  if (p == std::string::npos) return "";
  const auto b = p + key.size() + 2;
  return tag.substr(b, tag.find('"', b) - b);
}

std::vector<double> numbers(const std::string& text) {
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p >= end) break;
    double x = 0.0;
    auto [q, ec] = std::from_chars(p, end, x);
    if (ec != std::errc()) throw Error(ErrorCode::Format, "VTU: malformed number");
    out.push_back(x);
    p = q;
  }
  return out;
}

}  // namespace

void write_vtu(const Mesh& mesh, const VtuField& f, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const int nc = mesh.n_cells();
  const int np = 3 * nc;

  std::vector<double> points;
  points.reserve(3 * np);
  for (int c = 0; c < nc; ++c) {
    for (int v : mesh.cells()[c]) {
      const Vec2& x = mesh.vertices()[v];
      points.insert(points.end(), {x.x(), x.y(), 0.0});
    }
  }

  out << "<?xml version=\"1.0\"?>\n"
      << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
      << "  <UnstructuredGrid>\n"
      << "    <Piece NumberOfPoints=\"" << np << "\" NumberOfCells=\"" << nc << "\">\n";
  if (f.velocity) {
    std::vector<double> vel, mag, vort, pres;
    vel.reserve(3 * np);
    for (int c = 0; c < nc; ++c) {
      for (const Vec2& xi : kRefVertex) {
        const Vec2 u = evaluate_vector(*f.velocity, c, xi);
        vel.insert(vel.end(), {u.x(), u.y(), 0.0});
        mag.push_back(u.norm());
        if (f.vorticity) vort.push_back(evaluate_scalar(*f.vorticity, c, xi));
        if (f.pressure) pres.push_back(evaluate_scalar(*f.pressure, c, xi));
      }
    }
    out << "      <PointData Vectors=\"velocity\">\n";
    data_array(out, "velocity", 3, vel);
    data_array(out, "velocity_magnitude", 1, mag);
    if (f.vorticity) data_array(out, "vorticity", 1, vort);
    if (f.pressure) data_array(out, "pressure", 1, pres);
    out << "      </PointData>\n";
  }
  out << "      <Points>\n";
  data_array(out, "Points", 3, points);
  out << "      </Points>\n      <Cells>\n"
      << "        <DataArray type=\"Int32\" Name=\"connectivity\" format=\"ascii\">\n         ";
  for (int i = 0; i < np; ++i) out << ' ' << i;
  out << "\n        </DataArray>\n        <DataArray type=\"Int32\" Name=\"offsets\" format=\"ascii\">\n         ";
  for (int c = 1; c <= nc; ++c) out << ' ' << 3 * c;
  out << "\n        </DataArray>\n        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n         ";
  for (int c = 0; c < nc; ++c) out << " 5";
  out << "\n        </DataArray>\n      </Cells>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

const std::vector<double>* VtuData::array(const std::string& name) const {
  for (const auto& [n, v] : arrays) {
    if (n == name) return &v;
  }
  return nullptr;
}

VtuData read_vtu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find("<VTKFile type=\"UnstructuredGrid\"") == std::string::npos) {
    throw Error(ErrorCode::Format, "VTU: not an UnstructuredGrid file");
  }
  VtuData d;
  std::vector<double> connectivity;
  std::size_t pos = 0;
  while ((pos = text.find("<DataArray", pos)) != std::string::npos) {
    const auto close = text.find('>', pos);
    const auto end = text.find("</DataArray>", close);
    if (close == std::string::npos || end == std::string::npos) throw Error(ErrorCode::Format, "VTU: unterminated DataArray");
    const std::string tag = text.substr(pos, close - pos);
    const std::string name = attribute(tag, "Name");
    std::vector<double> values = numbers(text.substr(close + 1, end - close - 1));
    if (name == "Points") {
      if (values.size() % 3) throw Error(ErrorCode::Format, "VTU: point array length");
      for (std::size_t i = 0; i < values.size(); i += 3) d.points.emplace_back(values[i], values[i + 1]);
    } else if (name == "connectivity") {
      connectivity = std::move(values);
    } else if (name != "offsets" && name != "types") {
      d.arrays.emplace_back(name, std::move(values));
    }
    pos = end;
  }
  if (connectivity.size() % 3) throw Error(ErrorCode::Format, "VTU: only triangles are supported");
  for (std::size_t i = 0; i < connectivity.size(); i += 3) {
    d.cells.push_back({static_cast<int>(connectivity[i]), static_cast<int>(connectivity[i + 1]),
                       static_cast<int>(connectivity[i + 2])});
  }
  return d;
}

}  // namespace dgflow::bench
