#include "dgflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "dgflow/error.hpp"

namespace dgflow {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_double_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// True if p lies strictly inside segment ab.
bool on_open_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = (p - a).dot(d) / len2;
  if (t <= 1e-12 || t >= 1.0 - 1e-12) return false;
  return (a + t * d - p).norm() <= 1e-10 * std::sqrt(len2);
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
           std::vector<BoundaryEdge> boundary_edges,
           std::map<int, std::string> tag_names)
    : vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      tag_names_(std::move(tag_names)) {
  if (cells_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "mesh has no cells");
  }
  const int nv = n_vertices();
  geometry_.resize(cells_.size());
  cell_diameter_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    for (int v : cell) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorCode::Format,
                    "cell " + std::to_string(c) + " references missing vertex " +
                        std::to_string(v));
      }
    }
    double area2 = signed_double_area(vertices_[cell[0]], vertices_[cell[1]],
                                      vertices_[cell[2]]);
    if (area2 < 0.0) {
      std::swap(cell[1], cell[2]);
      area2 = -area2;
    }
    const Vec2& p0 = vertices_[cell[0]];
    const Vec2& p1 = vertices_[cell[1]];
    const Vec2& p2 = vertices_[cell[2]];
    const double scale = std::max({(p1 - p0).squaredNorm(), (p2 - p0).squaredNorm(),
                                   (p2 - p1).squaredNorm()});
    if (!(area2 > 1e-14 * scale)) {
      throw Error(ErrorCode::DegenerateGeometry,
                  "cell " + std::to_string(c) + " has zero area");
    }
    CellGeometry& g = geometry_[c];
    g.origin = p0;
    g.jacobian.col(0) = p1 - p0;
    g.jacobian.col(1) = p2 - p0;
    g.det = g.jacobian.determinant();
    g.inverse_jacobian = g.jacobian.inverse();
    cell_diameter_[c] = std::sqrt(scale);
  }
  build_faces(boundary_edges);
}

void Mesh::build_faces(const std::vector<BoundaryEdge>& boundary_edges) {
  std::unordered_map<std::uint64_t, int> face_of_edge;
  face_of_edge.reserve(cells_.size() * 2);
  cell_faces_.assign(cells_.size(), {-1, -1, -1});

  for (int c = 0; c < n_cells(); ++c) {
    for (int e = 0; e < 3; ++e) {
      const auto [a, b] = local_edge_vertices(c, e);
      const auto key = edge_key(a, b);
      auto it = face_of_edge.find(key);
      if (it == face_of_edge.end()) {
        Face f;
        f.vertices = {std::min(a, b), std::max(a, b)};
        f.owner = c;
        f.owner_edge = e;
        f.normal = outward_normal(c, e);
        f.diameter = (vertices_[a] - vertices_[b]).norm();
        face_of_edge.emplace(key, n_faces());
        cell_faces_[c][e] = n_faces();
        faces_.push_back(f);
      } else {
        Face& f = faces_[it->second];
        if (f.neighbor >= 0 || f.owner == c) {
          throw Error(ErrorCode::NonConforming,
                      "non-conforming mesh: edge (" + std::to_string(a) + "," +
                          std::to_string(b) + ") is shared by more than two cells");
        }
        f.neighbor = c;
        f.neighbor_edge = e;
        cell_faces_[c][e] = it->second;
      }
    }
  }

  std::unordered_map<std::uint64_t, int> tags;
  for (const auto& be : boundary_edges) {
    tags[edge_key(be.vertices[0], be.vertices[1])] = be.tag;
  }
  for (auto& f : faces_) {
    if (!f.is_boundary()) continue;
    auto it = tags.find(edge_key(f.vertices[0], f.vertices[1]));
    if (it != tags.end()) {
      f.tag = it->second;
      continue;
    }
    // An untagged single-sided edge is either a hanging-node artifact or a
    // genuinely untagged boundary edge; distinguish the two.
    for (const auto& g : faces_) {
      if (!g.is_boundary() || &g == &f) continue;
      for (int i = 0; i < 2; ++i) {
        const int v = f.vertices[i], w = g.vertices[i];
        const int hanging =
            on_open_segment(vertices_[v], vertices_[g.vertices[0]], vertices_[g.vertices[1]]) ? v
            : on_open_segment(vertices_[w], vertices_[f.vertices[0]], vertices_[f.vertices[1]]) ? w
                                                                                               : -1;
        if (hanging >= 0) {
          throw Error(ErrorCode::NonConforming,
                      "non-conforming mesh: hanging vertex " + std::to_string(hanging));
        }
      }
    }
    throw Error(ErrorCode::MissingBoundaryTag,
                "boundary edge (" + std::to_string(f.vertices[0]) + "," +
                    std::to_string(f.vertices[1]) + ") has no boundary tag");
  }
}

std::array<int, 2> Mesh::local_edge_vertices(int cell, int local_edge) const {
  const auto& c = cells_[cell];
  return {c[(local_edge + 1) % 3], c[(local_edge + 2) % 3]};
}

Vec2 Mesh::outward_normal(int cell, int local_edge) const {
  const auto [a, b] = local_edge_vertices(cell, local_edge);
  const Vec2 d = vertices_[b] - vertices_[a];
  return Vec2(d.y(), -d.x()) / d.norm();
}

double Mesh::area() const {
  double a = 0.0;
  for (int c = 0; c < n_cells(); ++c) a += cell_area(c);
  return a;
}

Vec2 Mesh::centroid() const {
  Vec2 s = Vec2::Zero();
  for (int c = 0; c < n_cells(); ++c) {
    const auto& v = cells_[c];
    s += cell_area(c) * (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) / 3.0;
  }
  return s / area();
}

int Mesh::tag_id(const std::string& name) const {
  for (const auto& [id, n] : tag_names_) {
    if (n == name) return id;
  }
  return -1;
}

std::string Mesh::tag_name(int tag) const {
  auto it = tag_names_.find(tag);
  return it == tag_names_.end() ? std::to_string(tag) : it->second;
}

std::vector<BoundaryEdge> Mesh::boundary_edges() const {
  std::vector<BoundaryEdge> out;
  for (const auto& f : faces_) {
    if (f.is_boundary()) out.push_back({f.vertices, f.tag});
  }
  return out;
}

MeshStats mesh_stats(const Mesh& mesh) {
  MeshStats s;
  s.n_cells = mesh.n_cells();
  s.n_faces = mesh.n_faces();
  s.h_min = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    s.h_max = std::max(s.h_max, mesh.cell_diameter(c));
    s.h_min = std::min(s.h_min, mesh.cell_diameter(c));
  }
  return s;
}

Mesh generate_rectangle(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorCode::InvalidArgument, "generate_rectangle: nx and ny must be >= 1");
  }
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y())) {
    throw Error(ErrorCode::InvalidArgument,
                "generate_rectangle: degenerate box, upper corner must exceed lower "
                "corner in both directions");
  }
  std::vector<Vec2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx,
                            lo.y() + (hi.y() - lo.y()) * j / ny);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  }
  std::vector<BoundaryEdge> edges;
  for (int j = 0; j < ny; ++j) {
    edges.push_back({{id(0, j), id(0, j + 1)}, 1});
    edges.push_back({{id(nx, j), id(nx, j + 1)}, 2});
  }
  for (int i = 0; i < nx; ++i) {
    edges.push_back({{id(i, 0), id(i + 1, 0)}, 3});
    edges.push_back({{id(i, ny), id(i + 1, ny)}, 4});
  }
  return Mesh(std::move(vertices), std::move(cells), std::move(edges),
              {{1, "left"}, {2, "right"}, {3, "bottom"}, {4, "top"}});
}

void write_mesh_text(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "dgflow-mesh 1\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices()) out << v.x() << " " << v.y() << "\n";
  out << "cells " << mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells()) out << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "tags " << mesh.tag_names().size() << "\n";
  for (const auto& [id, name] : mesh.tag_names()) out << id << " " << name << "\n";
  const auto edges = mesh.boundary_edges();
  out << "boundary_edges " << edges.size() << "\n";
  for (const auto& e : edges) {
    out << e.vertices[0] << " " << e.vertices[1] << " " << e.tag << "\n";
  }
  out << "faces " << mesh.n_faces() << "\n";
  for (const auto& f : mesh.faces()) {
    out << f.vertices[0] << " " << f.vertices[1] << " " << f.owner << " " << f.neighbor
        << " " << f.tag << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Mesh read_mesh_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file " + path.string());
  auto expect = [&](const std::string& word) {
    std::string w;
    std::size_t n = 0;
    if (!(in >> w >> n) || w != word) {
      throw Error(ErrorCode::Format, "mesh dump: expected section '" + word + "'");
    }
    return n;
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "dgflow-mesh") {
    throw Error(ErrorCode::Format, "not a dgflow mesh dump: " + path.string());
  }
  std::vector<Vec2> vertices(expect("vertices"));
  for (auto& v : vertices) in >> v.x() >> v.y();
  std::vector<std::array<int, 3>> cells(expect("cells"));
  for (auto& c : cells) in >> c[0] >> c[1] >> c[2];
  std::map<int, std::string> tags;
  for (std::size_t i = 0, n = expect("tags"); i < n; ++i) {
    int id = 0;
    std::string name;
    in >> id >> name;
    tags[id] = name;
  }
  std::vector<BoundaryEdge> edges(expect("boundary_edges"));
  for (auto& e : edges) in >> e.vertices[0] >> e.vertices[1] >> e.tag;
  if (!in) throw Error(ErrorCode::Format, "truncated mesh dump " + path.string());
  return Mesh(std::move(vertices), std::move(cells), std::move(edges), std::move(tags));
}

}  // namespace dgflow
