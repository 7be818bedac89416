#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stdgsem/mesh.hpp"
#include "stdgsem/quadrature.hpp"

namespace stdgsem {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return std::string(buf);
}

inline std::ofstream open_csv(const std::string& path,
                              const std::string& label) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("open_csv: cannot open " + path);
  out << "# stdgsem-csv v1 " << label << "\n";
  return out;
}

// Rows in cell-lex, node-lex, component order.
inline void write_field_csv(const DgSpace& space, const Vec<>& coeffs,
                            const std::string& path,
                            const std::string& label = "field") {
  if (coeffs.size() != space.dof())
    throw std::invalid_argument("write_field_csv: coefficient size mismatch");
  auto out = open_csv(path, label);
  out << (space.mesh.d == 2 ? "x,y,component,value\n" : "x,component,value\n");
  for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
    for (int node = 0; node < space.nodes_per_cell(); ++node) {
      const Vec<> x = space.node_coord(cell, node);
      for (int comp = 0; comp < space.r; ++comp) {
        out << fmt_g(x[0]);
        if (space.mesh.d == 2) out << "," << fmt_g(x[1]);
        out << "," << comp << ","
            << fmt_g(coeffs[space.coeff_index(cell, node, comp)]) << "\n";
      }
    }
}

// One row per step: step index, time, global L2 norm per component.
inline void write_trajectory_csv(const DgSpace& space, const Vec<>& times,
                                 const std::vector<Vec<>>& states,
                                 const std::string& path,
                                 const std::string& label = "trajectory") {
  if (int(states.size()) != times.size())
    throw std::invalid_argument("write_trajectory_csv: size mismatch");
  auto out = open_csv(path, label);
  out << "step,t";
  for (int comp = 0; comp < space.r; ++comp) out << ",norm_c" << comp;
  out << "\n";
  const GlobalMassDiagonal mass = global_mass(space);
  for (size_t k = 0; k < states.size(); ++k) {
    out << k << "," << fmt_g(times[int(k)]);
    for (int comp = 0; comp < space.r; ++comp) {
      double acc = 0.0;
      for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
        for (int node = 0; node < space.nodes_per_cell(); ++node) {
          const int idx = space.coeff_index(cell, node, comp);
          acc += mass.diag[idx] * states[k][idx] * states[k][idx];
        }
      out << "," << fmt_g(std::sqrt(acc));
    }
    out << "\n";
  }
}

// Space-time element dump: one row per (element, temporal node, spatial node,
// component).
inline void write_elements_csv(const DgSpace& space, int n_tau,
                               const Vec<>& times,
                               const std::vector<Vec<>>& element_solutions,
                               const std::string& path,
                               const std::string& label = "elements") {
  if (int(element_solutions.size()) + 1 != times.size())
    throw std::invalid_argument("write_elements_csv: size mismatch");
  const auto rule = lgl_rule<double>(n_tau);
  auto out = open_csv(path, label);
  out << "element,stage,tau,t,"
      << (space.mesh.d == 2 ? "x,y" : "x") << ",component,value\n";
  const int dof = space.dof();
  for (size_t n = 0; n < element_solutions.size(); ++n) {
    const double dt = times[int(n) + 1] - times[int(n)];
    for (int j = 0; j < n_tau; ++j) {
      const double t = times[int(n)] + 0.5 * dt * (1.0 + rule.nodes[j]);
      for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
        for (int node = 0; node < space.nodes_per_cell(); ++node) {
          const Vec<> x = space.node_coord(cell, node);
          for (int comp = 0; comp < space.r; ++comp) {
            out << n << "," << j << "," << fmt_g(rule.nodes[j]) << ","
                << fmt_g(t) << "," << fmt_g(x[0]);
            if (space.mesh.d == 2) out << "," << fmt_g(x[1]);
            out << "," << comp << ","
                << fmt_g(element_solutions[n][j * dof +
                                             space.coeff_index(cell, node,
                                                               comp)])
                << "\n";
          }
        }
    }
  }
}

}  // namespace stdgsem
