#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

#include "stdgsem/mesh.hpp"
#include "stdgsem/models.hpp"

namespace stdgsem {

using SparseMat = Eigen::SparseMatrix<double>;

// Semidiscrete ODE system u' = F(t, u) with F = M^{-1} L_h(u).
struct SemiDiscreteSystem {
  DgSpace space;
  FluxModel model;
  double eta = 0.0;
  int dof = 0;
  std::function<Vec<>(double t, const Vec<>& u)> rhs;
  std::function<SparseMat(double t, const Vec<>& u)> jacobian;
};

// Scalar linear test equation u' = -u, u(0) = 4, exact u(t) = 4 e^{-t}.
inline SemiDiscreteSystem test_equation_system() {
  SemiDiscreteSystem sys;
  Vec<> lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  Eigen::VectorXi nc(1);
  nc << 1;
  sys.space = dg_space(uniform_mesh(1, lo, hi, nc), 0);
  sys.model = advection_model((Vec<>(1) << 0.0).finished());
  sys.dof = 1;
  sys.rhs = [](double, const Vec<>& u) { return (-u).eval(); };
  sys.jacobian = [](double, const Vec<>& u) {
    SparseMat J(u.size(), u.size());
    for (int i = 0; i < u.size(); ++i) J.insert(i, i) = -1.0;
    J.makeCompressed();
    return J;
  };
  return sys;
}

inline double test_equation_exact(double t) { return 4.0 * std::exp(-t); }

}  // namespace stdgsem
