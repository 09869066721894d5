#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace dgflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Affine map from the reference triangle (0,0),(1,0),(0,1): x = origin + jacobian * xi.
struct CellGeometry {
  Vec2 origin;
  Mat2 jacobian;
  Mat2 inverse_jacobian;
  double det = 0.0;

  Vec2 map(const Vec2& xi) const { return origin + jacobian * xi; }
};

/// An edge of the triangulation. Vertices are stored low global index first,
/// which fixes the edge parametrization shared by both adjacent cells.
struct Face {
  std::array<int, 2> vertices{};
  int owner = -1;            // K+, the adjacent cell with the smaller index
  int neighbor = -1;         // K-, or -1 on the boundary
  int owner_edge = -1;       // local edge index in the owner
  int neighbor_edge = -1;    // local edge index in the neighbor
  Vec2 normal = Vec2::Zero();  // unit, points from K+ into K- (outward on the boundary)
  double diameter = 0.0;
  int tag = 0;               // boundary tag id, 0 for interior faces

  bool is_boundary() const { return neighbor < 0; }
};

struct BoundaryEdge {
  std::array<int, 2> vertices{};
  int tag = 0;
};

/// Conforming 2D triangulation. Local edge e of a cell joins local vertices
/// (e+1)%3 and (e+2)%3, i.e. it is the edge opposite vertex e.
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
       std::vector<BoundaryEdge> boundary_edges,
       std::map<int, std::string> tag_names);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::map<int, std::string>& tag_names() const { return tag_names_; }

  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }

  const CellGeometry& geometry(int cell) const { return geometry_[cell]; }
  double cell_area(int cell) const { return 0.5 * geometry_[cell].det; }
  double cell_diameter(int cell) const { return cell_diameter_[cell]; }
  int cell_face(int cell, int local_edge) const { return cell_faces_[cell][local_edge]; }

  /// Global vertex indices of local edge `local_edge` in traversal order.
  std::array<int, 2> local_edge_vertices(int cell, int local_edge) const;

  /// Outward unit normal of `cell` on its local edge.
  Vec2 outward_normal(int cell, int local_edge) const;

  double area() const;
  Vec2 centroid() const;

  /// Tag id for a symbolic name, or -1.
  int tag_id(const std::string& name) const;
  std::string tag_name(int tag) const;

  std::vector<BoundaryEdge> boundary_edges() const;

 private:
  void build_faces(const std::vector<BoundaryEdge>& boundary_edges);

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> cell_faces_;
  std::vector<CellGeometry> geometry_;
  std::vector<double> cell_diameter_;
  std::map<int, std::string> tag_names_;
};

struct MeshStats {
  double h_max = 0.0;
  double h_min = 0.0;
  int n_cells = 0;
  int n_faces = 0;
};

MeshStats mesh_stats(const Mesh& mesh);

/// Uniform nx x ny grid of squares, each split along its lower-left to
/// upper-right diagonal. Sides are tagged 1 left, 2 right, 3 bottom, 4 top.
Mesh generate_rectangle(const Vec2& lo, const Vec2& hi, int nx, int ny);

/// Gmsh ASCII 2.2: 2-node lines carry boundary tags, 3-node triangles become cells.
Mesh import_gmsh(const std::filesystem::path& path);

/// Plain-text dump (vertices, cells, tagged boundary edges) and its reader.
void write_mesh_text(const Mesh& mesh, const std::filesystem::path& path);
Mesh read_mesh_text(const std::filesystem::path& path);

}  // namespace dgflow
