#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "stdgsem/quadrature.hpp"

namespace stdgsem {

// Uniform cuboid mesh in d in {1,2} dimensions, periodic in every direction.
struct Mesh {
  int d = 1;
  Vec<> lower, upper;
  Eigen::VectorXi cells;
  Vec<> spacing;

  int n_cells() const { return cells.prod(); }
  int cell_count(int axis) const { return cells[axis]; }
  // Cells are numbered x-fastest: cell = cy * nx + cx.
  int cell_index(int cx, int cy = 0) const {
    return d == 1 ? cx : cy * cells[0] + cx;
  }
  Eigen::Vector2i cell_multi_index(int cell) const {
    if (d == 1) return {cell, 0};
    return {cell % cells[0], cell / cells[0]};
  }
  int neighbor(int cell, int axis, int dir) const {
    Eigen::Vector2i ci = cell_multi_index(cell);
    ci[axis] = (ci[axis] + dir + cells[axis]) % cells[axis];
    return cell_index(ci[0], ci[1]);
  }
};

inline Mesh uniform_mesh(int d, const Vec<>& lower, const Vec<>& upper,
                         const Eigen::VectorXi& cells) {
  if (d < 1 || d > 2) throw std::invalid_argument("uniform_mesh: d in {1,2}");
  if (lower.size() != d || upper.size() != d || cells.size() != d)
    throw std::invalid_argument("uniform_mesh: inconsistent sizes");
  for (int a = 0; a < d; ++a) {
    if (!(upper[a] > lower[a]))
      throw std::invalid_argument("uniform_mesh: need upper > lower");
    if (cells[a] < 1)
      throw std::invalid_argument("uniform_mesh: need cells >= 1");
  }
  Mesh mesh;
  mesh.d = d;
  mesh.lower = lower;
  mesh.upper = upper;
  mesh.cells = cells;
  mesh.spacing = (upper - lower).cwiseQuotient(cells.cast<double>());
  return mesh;
}

// Tensor-product nodal DG space of degree p per dimension with r components,
// collocated at the LGL points of the [-1,1]^d reference element.
struct DgSpace {
  Mesh mesh;
  int p = 1;
  int r = 1;
  LagrangeBasis<> basis;

  int nodes_1d() const { return p + 1; }
  int nodes_per_cell() const {
    return mesh.d == 1 ? p + 1 : (p + 1) * (p + 1);
  }
  int dof() const { return r * mesh.n_cells() * nodes_per_cell(); }
  // Nodes are numbered x-fastest within a cell: node = iy * (p+1) + ix.
  int node_index(int ix, int iy = 0) const {
    return mesh.d == 1 ? ix : iy * (p + 1) + ix;
  }
  Eigen::Vector2i node_multi_index(int node) const {
    if (mesh.d == 1) return {node, 0};
    return {node % (p + 1), node / (p + 1)};
  }
  // coeff = (cell * nodes_per_cell + node) * r + comp
  int coeff_index(int cell, int node, int comp = 0) const {
    return (cell * nodes_per_cell() + node) * r + comp;
  }
  Vec<> node_coord(int cell, int node) const {
    const Eigen::Vector2i ci = mesh.cell_multi_index(cell);
    const Eigen::Vector2i ni = node_multi_index(node);
    Vec<> x(mesh.d);
    for (int a = 0; a < mesh.d; ++a)
      x[a] = mesh.lower[a] +
             (ci[a] + 0.5 * (1.0 + basis.rule.nodes[ni[a]])) * mesh.spacing[a];
    return x;
  }
};

inline DgSpace dg_space(const Mesh& mesh, int p, int r = 1) {
  if (p < 0) throw std::invalid_argument("dg_space: need p >= 0");
  if (r < 1) throw std::invalid_argument("dg_space: need r >= 1");
  DgSpace space;
  space.mesh = mesh;
  space.p = p;
  space.r = r;
  if (p == 0) {
    // Degenerate midpoint collocation; no LGL rule has a single node.
    space.basis.rule.n = 1;
    space.basis.rule.nodes = Vec<>::Zero(1);
    space.basis.rule.weights = Vec<>::Constant(1, 2.0);
    space.basis.barycentric_weights = Vec<>::Ones(1);
  } else {
    space.basis = lagrange_basis(lgl_rule(p + 1));
  }
  return space;
}

struct DiscreteField {
  DgSpace space;
  Vec<> coeffs;
  double time_tag = 0.0;
};

// Diagonal global mass matrix: cell volume / 2^d times tensor LGL weights,
// replicated across the r components of each node.
struct GlobalMassDiagonal {
  DgSpace space;
  Vec<> diag;
};

inline GlobalMassDiagonal global_mass(const DgSpace& space) {
  GlobalMassDiagonal mass;
  mass.space = space;
  mass.diag.resize(space.dof());
  const double vol_scale = space.mesh.spacing.prod() /
                           std::pow(2.0, space.mesh.d);
  const auto& w = space.basis.rule.weights;
  for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
    for (int node = 0; node < space.nodes_per_cell(); ++node) {
      const Eigen::Vector2i ni = space.node_multi_index(node);
      double wn = w[ni[0]];
      if (space.mesh.d == 2) wn *= w[ni[1]];
      for (int comp = 0; comp < space.r; ++comp)
        mass.diag[space.coeff_index(cell, node, comp)] = vol_scale * wn;
    }
  return mass;
}

using SpaceFunction = std::function<Vec<>(const Vec<>& x)>;

inline DiscreteField interpolate(const DgSpace& space, const SpaceFunction& f,
                                 double t = 0.0) {
  DiscreteField field;
  field.space = space;
  field.time_tag = t;
  field.coeffs.resize(space.dof());
  for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
    for (int node = 0; node < space.nodes_per_cell(); ++node) {
      const Vec<> val = f(space.node_coord(cell, node));
      for (int comp = 0; comp < space.r; ++comp)
        field.coeffs[space.coeff_index(cell, node, comp)] = val[comp];
    }
  return field;
}

inline DiscreteField interpolate_scalar(
    const DgSpace& space, const std::function<double(const Vec<>&)>& f,
    double t = 0.0) {
  return interpolate(
      space, [&](const Vec<>& x) { return Vec<>::Constant(1, f(x)); }, t);
}

// Global L2 norm: one square root of the mass-weighted sum over all cells
// and components.
inline double l2_norm(const DiscreteField& field) {
  const Vec<> diag = global_mass(field.space).diag;
  return std::sqrt(field.coeffs.cwiseAbs2().dot(diag));
}

inline double l2_error(
    const DiscreteField& field,
    const std::function<Vec<>(const Vec<>& x, double t)>& exact, double t) {
  DiscreteField diff = interpolate(
      field.space, [&](const Vec<>& x) { return exact(x, t); }, t);
  diff.coeffs = field.coeffs - diff.coeffs;
  return l2_norm(diff);
}

}  // namespace stdgsem
