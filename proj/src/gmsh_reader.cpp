#include <fstream>
#include <sstream>
#include <unordered_map>

#include "dgflow/error.hpp"
#include "dgflow/mesh.hpp"

namespace dgflow {

namespace {

constexpr int kGmshLine = 1;
constexpr int kGmshTriangle = 2;
constexpr int kGmshPoint = 15;

std::string next_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Format, "unexpected end of file in " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Mesh import_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file " + path.string());
  const std::string name = path.string();

  std::map<int, std::string> tag_names;
  std::vector<Vec2> vertices;
  std::unordered_map<long, int> vertex_index;
  std::vector<std::array<int, 3>> cells;
  std::vector<BoundaryEdge> edges;
  bool have_format = false;

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      std::istringstream ss(next_line(in, name));
      double version = 0.0;
      int file_type = -1;
      ss >> version >> file_type;
      if (version < 2.0 || version >= 3.0 || file_type != 0) {
        throw Error(ErrorCode::Format,
                    name + ": only Gmsh ASCII format version 2.x is supported");
      }
      have_format = true;
      next_line(in, name);  // $EndMeshFormat
    } else if (line == "$PhysicalNames") {
      const int n = std::stoi(next_line(in, name));
      for (int i = 0; i < n; ++i) {
        std::istringstream ss(next_line(in, name));
        int dim = 0, tag = 0;
        std::string label;
        ss >> dim >> tag >> label;
        if (label.size() >= 2 && label.front() == '"') label = label.substr(1, label.size() - 2);
        tag_names[tag] = label;
      }
      next_line(in, name);
    } else if (line == "$Nodes") {
      const int n = std::stoi(next_line(in, name));
      vertices.reserve(n);
      for (int i = 0; i < n; ++i) {
        std::istringstream ss(next_line(in, name));
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z)) {
          throw Error(ErrorCode::Format, name + ": malformed node line");
        }
        vertex_index[id] = static_cast<int>(vertices.size());
        vertices.emplace_back(x, y);
      }
      next_line(in, name);
    } else if (line == "$Elements") {
      const int n = std::stoi(next_line(in, name));
      for (int i = 0; i < n; ++i) {
        std::istringstream ss(next_line(in, name));
        long id = 0;
        int type = 0, ntags = 0;
        ss >> id >> type >> ntags;
        std::vector<int> tags(ntags);
        for (auto& t : tags) ss >> t;
        const int physical = ntags > 0 ? tags[0] : 0;
        auto node = [&](long gid) {
          auto it = vertex_index.find(gid);
          if (it == vertex_index.end()) {
            throw Error(ErrorCode::Format, name + ": element references unknown node " +
                                               std::to_string(gid));
          }
          return it->second;
        };
        if (type == kGmshTriangle) {
          long a = 0, b = 0, c = 0;
          ss >> a >> b >> c;
          cells.push_back({node(a), node(b), node(c)});
        } else if (type == kGmshLine) {
          long a = 0, b = 0;
          ss >> a >> b;
          if (physical <= 0) {
            throw Error(ErrorCode::MissingBoundaryTag,
                        name + ": line element " + std::to_string(id) +
                            " has no physical tag");
          }
          edges.push_back({{node(a), node(b)}, physical});
        } else if (type == kGmshPoint) {
          continue;
        } else {
          throw Error(ErrorCode::UnsupportedElement,
                      name + ": unsupported element type " + std::to_string(type));
        }
        if (!ss) throw Error(ErrorCode::Format, name + ": malformed element line");
      }
      next_line(in, name);
    }
  }
  if (!have_format) throw Error(ErrorCode::Format, name + ": missing $MeshFormat section");
  if (cells.empty()) throw Error(ErrorCode::Format, name + ": no triangles found");
  for (const auto& e : edges) {
    if (!tag_names.count(e.tag)) tag_names[e.tag] = std::to_string(e.tag);
  }
  return Mesh(std::move(vertices), std::move(cells), std::move(edges), std::move(tag_names));
}

}  // namespace dgflow
