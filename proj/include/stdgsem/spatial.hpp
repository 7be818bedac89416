#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stdgsem/mesh.hpp"
#include "stdgsem/models.hpp"
#include "stdgsem/system.hpp"

namespace stdgsem {

// Local Lax-Friedrichs (Rusanov) flux: {F_c}.n + (lambda/2)(uL - uR).
inline Vec<> llf_flux(const FluxModel& model, const Vec<>& uL, const Vec<>& uR,
                      const Vec<>& n, const Vec<>& x, double t) {
  const double lambda = model.max_wave_speed(uL, uR, n, x, t);
  return 0.5 * ((model.F_c(uL, x, t) + model.F_c(uR, x, t)) * n) +
         0.5 * lambda * (uL - uR);
}

// Interior-penalty facet terms for one quadrature point, carrying the signs
// in which they are SUBTRACTED from L_h (symmetry, consistency, penalty).
// sym multiplies n.grad(psi) on either side; trace_L/trace_R multiply the
// test-function trace of the respective cell.
struct IpSurfaceContrib {
  Vec<> sym;
  Vec<> trace_L;
  Vec<> trace_R;
};

inline IpSurfaceContrib interior_penalty_surface(
    const FluxModel& model, const Vec<>& uL, const Vec<>& uR,
    const Mat<>& grad_uL, const Mat<>& grad_uR, const Vec<>& n, const Vec<>& x,
    double t, double h_e, double eta) {
  const Vec<> u_avg = 0.5 * (uL + uR);
  const Mat<> jump_tensor = (uL - uR) * n.transpose();
  const Vec<> jump_flux = model.F_v(u_avg, jump_tensor, x, t) * n;
  const Vec<> avg_flux = 0.5 * (model.F_v(uL, grad_uL, x, t) +
                                model.F_v(uR, grad_uR, x, t)) *
                         n;
  IpSurfaceContrib ip;
  ip.sym = -0.5 * jump_flux;
  ip.trace_L = -avg_flux + (eta / h_e) * jump_flux;
  ip.trace_R = avg_flux - (eta / h_e) * jump_flux;
  return ip;
}

namespace detail {

// Smallest divisor >= 3 (n itself when n <= 2 or prime): same-colored cells
// on the periodic lattice are then at least 3 apart, so their one-ring
// column supports are disjoint.
inline int color_stride(int n) {
  if (n <= 2) return n;
  for (int m = 3; m < n; ++m)
    if (n % m == 0) return m;
  return n;
}

struct SpatialOperator {
  DgSpace space;
  FluxModel model;
  double eta;
  Vec<> mass_diag;

  Mat<> local_u(const Vec<>& u, int cell) const {
    Mat<> loc(space.nodes_per_cell(), space.r);
    for (int node = 0; node < space.nodes_per_cell(); ++node)
      for (int comp = 0; comp < space.r; ++comp)
        loc(node, comp) = u[space.coeff_index(cell, node, comp)];
    return loc;
  }

  // Nodal gradient of the cell interpolant: grads[node] is r x d.
  std::vector<Mat<>> local_grad(const Mat<>& loc) const {
    const int npc = space.nodes_per_cell();
    const int r = space.r;
    const int n1 = space.nodes_1d();
    const Mat<> D = diff_matrix(space.basis);
    std::vector<Mat<>> grads(npc, Mat<>::Zero(r, space.mesh.d));
    if (space.mesh.d == 1) {
      const double sx = 2.0 / space.mesh.spacing[0];
      for (int i = 0; i < n1; ++i)
        for (int k = 0; k < n1; ++k)
          grads[i].col(0) += sx * D(i, k) * loc.row(k).transpose();
    } else {
      const double sx = 2.0 / space.mesh.spacing[0];
      const double sy = 2.0 / space.mesh.spacing[1];
      for (int ix = 0; ix < n1; ++ix)
        for (int iy = 0; iy < n1; ++iy) {
          auto& g = grads[space.node_index(ix, iy)];
          for (int k = 0; k < n1; ++k) {
            g.col(0) += sx * D(ix, k) * loc.row(space.node_index(k, iy)).transpose();
            g.col(1) += sy * D(iy, k) * loc.row(space.node_index(ix, k)).transpose();
          }
        }
    }
    return grads;
  }

  Vec<> rhs(double t, const Vec<>& u) const {
    const int n1 = space.nodes_1d();
    const int p = space.p;
    const int r = space.r;
    const Mesh& mesh = space.mesh;
    const Mat<> D = diff_matrix(space.basis);
    const Vec<>& w = space.basis.rule.weights;
    Vec<> Lh = Vec<>::Zero(space.dof());

    // Element integrals: (F_c - F_v) : grad(psi) + S psi by collocation.
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
      const Mat<> loc = local_u(u, cell);
      std::vector<Mat<>> grads;
      if (model.has_diffusion) grads = local_grad(loc);
      std::vector<Mat<>> flux(space.nodes_per_cell());
      std::vector<Vec<>> source(space.nodes_per_cell());
      for (int node = 0; node < space.nodes_per_cell(); ++node) {
        const Vec<> x = space.node_coord(cell, node);
        const Vec<> un = loc.row(node).transpose();
        flux[node] = model.F_c(un, x, t);
        if (model.has_diffusion) flux[node] -= model.F_v(un, grads[node], x, t);
        source[node] = model.S(un, x, t);
      }
      if (mesh.d == 1) {
        const double h = mesh.spacing[0];
        for (int i = 0; i < n1; ++i)
          for (int comp = 0; comp < r; ++comp) {
            double val = w[i] * (h / 2.0) * source[i][comp];
            for (int k = 0; k < n1; ++k)
              val += w[k] * D(k, i) * flux[k](comp, 0);
            Lh[space.coeff_index(cell, i, comp)] += val;
          }
      } else {
        const double hx = mesh.spacing[0], hy = mesh.spacing[1];
        for (int ix = 0; ix < n1; ++ix)
          for (int iy = 0; iy < n1; ++iy)
            for (int comp = 0; comp < r; ++comp) {
              double val =
                  w[ix] * w[iy] * (hx * hy / 4.0) *
                  source[space.node_index(ix, iy)][comp];
              for (int k = 0; k < n1; ++k) {
                val += w[iy] * (hy / 2.0) * w[k] * D(k, ix) *
                       flux[space.node_index(k, iy)](comp, 0);
                val += w[ix] * (hx / 2.0) * w[k] * D(k, iy) *
                       flux[space.node_index(ix, k)](comp, 1);
              }
              Lh[space.coeff_index(cell, space.node_index(ix, iy), comp)] += val;
            }
      }
    }

    // Facet integrals, facet-major: LLF convective flux plus the
    // interior-penalty triple when the model has diffusion.
    const int n_axes = mesh.d;
    for (int axis = 0; axis < n_axes; ++axis) {
      const int nx = mesh.cells[0];
      const int ny = mesh.d == 2 ? mesh.cells[1] : 1;
      const double h_n = mesh.spacing[axis];  // spacing normal to the facet
      const double h_e = mesh.d == 2 ? mesh.spacing[axis] : mesh.spacing[0];
      Vec<> n = Vec<>::Zero(mesh.d);
      n[axis] = 1.0;
      for (int cy = 0; cy < ny; ++cy)
        for (int cx = 0; cx < nx; ++cx) {
          const int L = mesh.cell_index(cx, cy);
          const int R = mesh.neighbor(L, axis, +1);
          const int n_trans = mesh.d == 2 ? n1 : 1;
          for (int q = 0; q < n_trans; ++q) {
            // Facet quadrature point: L's upper face in `axis`.
            const int nodeL = mesh.d == 1
                                  ? p
                                  : (axis == 0 ? space.node_index(p, q)
                                               : space.node_index(q, p));
            const int nodeR = mesh.d == 1
                                  ? 0
                                  : (axis == 0 ? space.node_index(0, q)
                                               : space.node_index(q, 0));
            Vec<> x(mesh.d);
            {
              const Eigen::Vector2i ci = mesh.cell_multi_index(L);
              x[axis] = mesh.lower[axis] + (ci[axis] + 1) * mesh.spacing[axis];
              if (mesh.d == 2) {
                const int tangent = 1 - axis;
                x[tangent] = mesh.lower[tangent] +
                             (ci[tangent] +
                              0.5 * (1.0 + space.basis.rule.nodes[q])) *
                                 mesh.spacing[tangent];
              }
            }
            const double wf =
                mesh.d == 2
                    ? space.basis.rule.weights[q] * mesh.spacing[1 - axis] / 2.0
                    : 1.0;
            Vec<> uL(r), uR(r);
            for (int comp = 0; comp < r; ++comp) {
              uL[comp] = u[space.coeff_index(L, nodeL, comp)];
              uR[comp] = u[space.coeff_index(R, nodeR, comp)];
            }
            const Vec<> H = llf_flux(model, uL, uR, n, x, t);
            for (int comp = 0; comp < r; ++comp) {
              Lh[space.coeff_index(L, nodeL, comp)] -= H[comp] * wf;
              Lh[space.coeff_index(R, nodeR, comp)] += H[comp] * wf;
            }
            if (!model.has_diffusion) continue;

            // Traces of the full gradient on both sides.
            Mat<> gradL = Mat<>::Zero(r, mesh.d), gradR = Mat<>::Zero(r, mesh.d);
            const double sn = 2.0 / h_n;
            for (int k = 0; k < n1; ++k) {
              const int lkn = mesh.d == 1
                                  ? k
                                  : (axis == 0 ? space.node_index(k, q)
                                               : space.node_index(q, k));
              for (int comp = 0; comp < r; ++comp) {
                gradL(comp, axis) +=
                    sn * D(n1 - 1, k) * u[space.coeff_index(L, lkn, comp)];
                gradR(comp, axis) +=
                    sn * D(0, k) * u[space.coeff_index(R, lkn, comp)];
              }
            }
            if (mesh.d == 2) {
              const int tangent = 1 - axis;
              const double st = 2.0 / mesh.spacing[tangent];
              for (int k = 0; k < n1; ++k) {
                const int ltk = axis == 0 ? space.node_index(p, k)
                                          : space.node_index(k, p);
                const int rtk = axis == 0 ? space.node_index(0, k)
                                          : space.node_index(k, 0);
                for (int comp = 0; comp < r; ++comp) {
                  gradL(comp, tangent) +=
                      st * D(q, k) * u[space.coeff_index(L, ltk, comp)];
                  gradR(comp, tangent) +=
                      st * D(q, k) * u[space.coeff_index(R, rtk, comp)];
                }
              }
            }
            const IpSurfaceContrib ip = interior_penalty_surface(
                model, uL, uR, gradL, gradR, n, x, t, h_e, eta);
            for (int comp = 0; comp < r; ++comp) {
              Lh[space.coeff_index(L, nodeL, comp)] -= ip.trace_L[comp] * wf;
              Lh[space.coeff_index(R, nodeR, comp)] -= ip.trace_R[comp] * wf;
            }
            // Symmetry term scatters into the whole line of nodes normal to
            // the facet through n.grad(psi).
            for (int i = 0; i < n1; ++i) {
              const int lin = mesh.d == 1
                                  ? i
                                  : (axis == 0 ? space.node_index(i, q)
                                               : space.node_index(q, i));
              for (int comp = 0; comp < r; ++comp) {
                Lh[space.coeff_index(L, lin, comp)] -=
                    ip.sym[comp] * D(n1 - 1, i) * sn * wf;
                Lh[space.coeff_index(R, lin, comp)] -=
                    ip.sym[comp] * D(0, i) * sn * wf;
              }
            }
          }
        }
    }
    return Lh.cwiseQuotient(mass_diag);
  }
};

}  // namespace detail

// Exact Jacobian for linear models (one probe sweep from the zero state),
// central finite differences by colored column groups otherwise.
inline SparseMat spatial_jacobian(
    const DgSpace& space, const FluxModel& model,
    const std::function<Vec<>(double, const Vec<>&)>& rhs, double t,
    const Vec<>& u) {
  const Mesh& mesh = space.mesh;
  const int nx = mesh.cells[0];
  const int ny = mesh.d == 2 ? mesh.cells[1] : 1;
  const int mx = detail::color_stride(nx);
  const int my = detail::color_stride(ny);
  const int npc = space.nodes_per_cell();
  const int r = space.r;
  const int dof = space.dof();

  auto support_cells = [&](int cell) {
    std::vector<int> cells = {cell};
    for (int axis = 0; axis < mesh.d; ++axis)
      for (int dir : {-1, +1}) cells.push_back(mesh.neighbor(cell, axis, dir));
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
  };

  std::vector<Eigen::Triplet<double>> triplets;
  const Vec<> base = model.linear ? rhs(t, Vec<>::Zero(dof)) : Vec<>();
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  for (int ax = 0; ax < mx; ++ax)
    for (int ay = 0; ay < my; ++ay) {
      std::vector<int> group_cells;
      for (int cy = ay; cy < ny; cy += my)
        for (int cx = ax; cx < nx; cx += mx)
          group_cells.push_back(mesh.cell_index(cx, cy));
      for (int node = 0; node < npc; ++node)
        for (int comp = 0; comp < r; ++comp) {
          Vec<> cols(group_cells.size());
          if (model.linear) {
            Vec<> probe = Vec<>::Zero(dof);
            for (size_t g = 0; g < group_cells.size(); ++g)
              probe[space.coeff_index(group_cells[g], node, comp)] = 1.0;
            const Vec<> diff = rhs(t, probe) - base;
            for (size_t g = 0; g < group_cells.size(); ++g) {
              const int col = space.coeff_index(group_cells[g], node, comp);
              for (int cell : support_cells(group_cells[g]))
                for (int rn = 0; rn < npc; ++rn)
                  for (int rc = 0; rc < r; ++rc) {
                    const int row = space.coeff_index(cell, rn, rc);
                    if (diff[row] != 0.0)
                      triplets.emplace_back(row, col, diff[row]);
                  }
            }
          } else {
            Vec<> up = u, um = u;
            Vec<> steps(group_cells.size());
            for (size_t g = 0; g < group_cells.size(); ++g) {
              const int col = space.coeff_index(group_cells[g], node, comp);
              steps[g] = sqrt_eps * (1.0 + std::abs(u[col]));
              up[col] += steps[g];
              um[col] -= steps[g];
            }
            const Vec<> diff = rhs(t, up) - rhs(t, um);
            for (size_t g = 0; g < group_cells.size(); ++g) {
              const int col = space.coeff_index(group_cells[g], node, comp);
              for (int cell : support_cells(group_cells[g]))
                for (int rn = 0; rn < npc; ++rn)
                  for (int rc = 0; rc < r; ++rc) {
                    const int row = space.coeff_index(cell, rn, rc);
                    const double val = diff[row] / (2.0 * steps[g]);
                    if (val != 0.0) triplets.emplace_back(row, col, val);
                  }
            }
          }
        }
    }
  SparseMat J(dof, dof);
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

inline SemiDiscreteSystem assemble_semidiscrete(
    const DgSpace& space, const FluxModel& model,
    std::optional<double> eta = std::nullopt) {
  if (model.d != space.mesh.d)
    throw std::invalid_argument("assemble_semidiscrete: dimension mismatch");
  if (model.r != space.r)
    throw std::invalid_argument("assemble_semidiscrete: component mismatch");
  if (model.has_diffusion && space.p < 1)
    throw std::invalid_argument(
        "assemble_semidiscrete: interior penalty needs p >= 1");

  auto op = std::make_shared<detail::SpatialOperator>();
  op->space = space;
  op->model = model;
  op->eta = eta.value_or(space.p > 0 ? 10.0 * space.p * space.p : 1.0);
  op->mass_diag = global_mass(space).diag;

  SemiDiscreteSystem sys;
  sys.space = space;
  sys.model = model;
  sys.eta = op->eta;
  sys.dof = space.dof();
  sys.rhs = [op](double t, const Vec<>& u) { return op->rhs(t, u); };
  auto cache = std::make_shared<std::optional<SparseMat>>();
  sys.jacobian = [op, cache](double t, const Vec<>& u) {
    if (op->model.linear && cache->has_value()) return **cache;
    SparseMat J = spatial_jacobian(
        op->space, op->model,
        [op](double tt, const Vec<>& v) { return op->rhs(tt, v); }, t, u);
    if (op->model.linear) *cache = J;
    return J;
  };
  return sys;
}

}  // namespace stdgsem
