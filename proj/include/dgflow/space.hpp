#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dgflow/basis.hpp"
#include "dgflow/mesh.hpp"
#include "dgflow/quadrature.hpp"

namespace dgflow {

enum class SpaceKind { DgVector, DgScalar, Hdiv };

using VectorFunction = std::function<Vec2(const Vec2&)>;
using ScalarFunction = std::function<double(const Vec2&)>;

/// Global dof layout over a mesh.
///
/// DgVector: broken [P_{k+1}]^2, local dof = component * dim P_{k+1} + j.
/// DgScalar: broken P_k.
/// Hdiv: BDM_{k+1}; edge dofs are numbered per face (k+2 each), then interior
/// dofs per cell. Edge dofs on boundary faces are flagged as constrained.
class Space {
 public:
  Space(const Mesh& mesh, SpaceKind kind, int k);

  const Mesh& mesh() const { return *mesh_; }
  SpaceKind kind() const { return kind_; }
  int k() const { return k_; }
  bool is_vector() const { return kind_ != SpaceKind::DgScalar; }
  int n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  /// Polynomial degree of the shape functions.
  int degree() const { return kind_ == SpaceKind::DgScalar ? k_ : k_ + 1; }

  std::span<const int> cell_dofs(int cell) const {
    return {dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }
  /// +-1 factors relating the local reference shape to the global basis function.
  std::span<const double> cell_signs(int cell) const {
    return {signs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }

  const std::vector<int>& constrained_dofs() const { return constrained_; }
  bool is_constrained(int dof) const { return !constraint_mask_.empty() && constraint_mask_[dof]; }

  const ScalarBasis& scalar_basis() const { return *scalar_; }
  const BdmBasis& bdm_basis() const { return *bdm_; }

 private:
  const Mesh* mesh_;
  SpaceKind kind_;
  int k_;
  int n_dofs_ = 0;
  int dofs_per_cell_ = 0;
  std::vector<int> dofs_;
  std::vector<double> signs_;
  std::vector<int> constrained_;
  std::vector<char> constraint_mask_;
  std::shared_ptr<const ScalarBasis> scalar_;
  std::shared_ptr<const BdmBasis> bdm_;
};

/// Physical shape data of one cell at a set of points, stored point-major
/// (index q * n + i). Signs of global basis functions are already applied.
struct VectorShapes {
  int n = 0;
  int nq = 0;
  std::vector<Vec2> value;
  std::vector<Mat2> grad;  // grad(a, b) = d v_a / d x_b
  std::vector<double> div;

  const Vec2& v(int q, int i) const { return value[q * n + i]; }
  const Mat2& g(int q, int i) const { return grad[q * n + i]; }
  double d(int q, int i) const { return div[q * n + i]; }
};

struct ScalarShapes {
  int n = 0;
  int nq = 0;
  std::vector<double> value;
  std::vector<Vec2> grad;

  double v(int q, int i) const { return value[q * n + i]; }
  const Vec2& g(int q, int i) const { return grad[q * n + i]; }
};

/// Precomputed reference tables for a space at fixed cell and face rules.
/// Face points are parametrized along the face from its low to its high
/// global vertex, so both neighbors see the same physical points.
class ShapeEvaluator {
 public:
  ShapeEvaluator(const Space& space, int cell_degree, int face_degree);

  const Space& space() const { return *space_; }
  const QuadratureRule& cell_rule() const { return cell_rule_; }
  const QuadratureRule& face_rule() const { return face_rule_; }

  void cell(int cell, VectorShapes& out) const;
  void cell(int cell, ScalarShapes& out) const;
  void face(int cell, int local_edge, VectorShapes& out) const;
  void face(int cell, int local_edge, ScalarShapes& out) const;

  /// Physical quadrature points and weights (weights include the measure).
  void cell_points(int cell, std::vector<Vec2>& x, std::vector<double>& w) const;
  void face_points(int face, std::vector<Vec2>& x, std::vector<double>& w) const;

 private:
  struct Table {
    std::vector<Vec2> points;
    std::vector<double> sval;  // scalar/Lagrange values (DG spaces)
    std::vector<Vec2> sgrad;
    std::vector<Vec2> vval;    // BDM reference values
    std::vector<Mat2> vgrad;
  };
  Table make_table(std::vector<Vec2> points) const;
  void map_vector(const Table& t, int cell, VectorShapes& out) const;
  void map_scalar(const Table& t, int cell, ScalarShapes& out) const;
  const Table& face_table(int cell, int local_edge) const;

  const Space* space_;
  QuadratureRule cell_rule_;
  QuadratureRule face_rule_;
  Table cell_table_;
  Table face_tables_[3][2];  // [local edge][reversed]
};

/// Coefficient vector bound to a space.
struct Field {
  const Space* space = nullptr;
  Eigen::VectorXd coeffs;

  Field() = default;
  explicit Field(const Space& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.n_dofs())) {}
  Field(const Space& s, Eigen::VectorXd c) : space(&s), coeffs(std::move(c)) {}
};

/// Value of a vector field at a reference point of a cell.
Vec2 evaluate_vector(const Field& field, int cell, const Vec2& ref_point);
Mat2 evaluate_gradient(const Field& field, int cell, const Vec2& ref_point);
double evaluate_scalar(const Field& field, int cell, const Vec2& ref_point);

/// Cell-local L2 projection for DG spaces, canonical interpolation for Hdiv.
/// For Hdiv the boundary normal dofs are zeroed unless `constrain` is false,
/// and `subdivisions` > 1 selects composite rules for the dof moments.
Field project(const Space& space, const VectorFunction& f, bool constrain = true, int subdivisions = 1);
Field project(const Space& space, const ScalarFunction& f);

/// (1/|Omega|) * integral of a scalar field.
double mean_value(const Field& field);

}  // namespace dgflow
