#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stdgsem/models.hpp"
#include "stdgsem/newton.hpp"
#include "stdgsem/operators.hpp"
#include "stdgsem/system.hpp"

namespace stdgsem {

// One temporal element of the space-time discretization.  The unknown vector
// stacks the n_tau temporal-node states stage-major; node i lives at
// t_n + (dt/2)(1 + tau_i).
struct TimeElementSystem {
  SemiDiscreteSystem system;
  SbpOperators<> ops;
  double t_n = 0.0;
  double dt = 0.0;
  Vec<> u_n;

  int n_tau() const { return ops.n; }
};

namespace detail {

inline Vec<> st_node_times(const TimeElementSystem& sys) {
  const auto rule = lgl_rule<double>(sys.ops.n);
  Vec<> t(sys.ops.n);
  for (int i = 0; i < sys.ops.n; ++i)
    t[i] = sys.t_n + 0.5 * sys.dt * (1.0 + rule.nodes[i]);
  return t;
}

inline Vec<> st_rhs_block(const TimeElementSystem& sys, double t,
                          const Vec<>& u, int block) {
  try {
    return sys.system.rhs(t, u);
  } catch (const AdmissibilityError& err) {
    throw AdmissibilityError(
        "temporal node " + std::to_string(block) + ": " + err.what(),
        err.state);
  }
}

}  // namespace detail

// res_i = (B U*)_i - sum_j D(j,i) M(j,j) U_j - (dt/2) M(i,i) F(t_i, U_i)
// with upwind trace U* = (u_n, 0, ..., 0, U_{n-1}).
inline Vec<> st_residual(const TimeElementSystem& sys, const Vec<>& U) {
  const int n = sys.ops.n;
  const int dof = int(sys.u_n.size());
  if (U.size() != n * dof)
    throw std::invalid_argument("st_residual: expected " +
                                std::to_string(n * dof) + " unknowns");
  const Vec<> times = detail::st_node_times(sys);
  const Mat<>& D = sys.ops.D;
  const Mat<>& M = sys.ops.M;
  Vec<> res = Vec<>::Zero(n * dof);
  res.segment(0, dof) -= sys.u_n;
  res.segment((n - 1) * dof, dof) += U.segment((n - 1) * dof, dof);
  for (int i = 0; i < n; ++i) {
    auto block = res.segment(i * dof, dof);
    for (int j = 0; j < n; ++j)
      block -= D(j, i) * M(j, j) * U.segment(j * dof, dof);
    block -= 0.5 * sys.dt * M(i, i) *
             detail::st_rhs_block(sys, times[i], U.segment(i * dof, dof), i);
  }
  return res;
}

// d res / d U: (e_n e_n^T - D^T M) (x) I - (dt/2)(M (x) I) blockdiag(J_i).
inline SparseMat st_jacobian(const TimeElementSystem& sys, const Vec<>& U) {
  const int n = sys.ops.n;
  const int dof = int(sys.u_n.size());
  if (U.size() != n * dof)
    throw std::invalid_argument("st_jacobian: expected " +
                                std::to_string(n * dof) + " unknowns");
  const Vec<> times = detail::st_node_times(sys);
  const Mat<>& D = sys.ops.D;
  const Mat<>& M = sys.ops.M;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double value = -D(j, i) * M(j, j);
      if (i == n - 1 && j == n - 1) value += 1.0;
      if (value == 0.0) continue;
      for (int k = 0; k < dof; ++k)
        triplets.emplace_back(i * dof + k, j * dof + k, value);
    }
  for (int i = 0; i < n; ++i) {
    const SparseMat Ji =
        sys.system.jacobian(times[i], U.segment(i * dof, dof));
    const double scale = -0.5 * sys.dt * M(i, i);
    for (int k = 0; k < Ji.outerSize(); ++k)
      for (SparseMat::InnerIterator it(Ji, k); it; ++it)
        triplets.emplace_back(i * dof + int(it.row()), i * dof + int(it.col()),
                              scale * it.value());
  }
  SparseMat J(n * dof, n * dof);
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

struct StdgStepResult {
  Vec<> U;
  Vec<> u_next;
  int newton_iterations = 0;
};

// Solve one temporal element from initial guess 1 (x) u_n; the element-final
// state is the last temporal-node block.
inline StdgStepResult stdg_step(const SemiDiscreteSystem& system,
                                const SbpOperators<>& ops, double t_n,
                                const Vec<>& u_n, double dt,
                                const NewtonConfig& cfg = {}) {
  if (!(dt > 0)) throw std::invalid_argument("stdg_step: dt > 0 required");
  TimeElementSystem sys{system, ops, t_n, dt, u_n};
  const int dof = int(u_n.size());
  NewtonResult sol;
  try {
    sol = newton_solve([&](const Vec<>& U) { return st_residual(sys, U); },
                       [&](const Vec<>& U) { return st_jacobian(sys, U); },
                       u_n.replicate(ops.n, 1), cfg);
  } catch (const NonconvergenceError& err) {
    throw NonconvergenceError(
        "stdg_step element at t=" + detail::fmt_short(t_n) +
            ", dt=" + detail::fmt_short(dt) + ": " + err.what(),
        err.last_iterate, err.residual_history);
  }
  StdgStepResult result;
  result.u_next = sol.u.segment((ops.n - 1) * dof, dof);
  result.U = std::move(sol.u);
  result.newton_iterations = sol.iterations;
  return result;
}

struct StdgTrajectory {
  Vec<> times;
  std::vector<Vec<>> states;             // n_steps + 1, states[0] = u0
  std::vector<Vec<>> element_solutions;  // stacked element unknowns per step
  int total_newton_iterations = 0;
};

inline StdgTrajectory stdg_integrate(const SemiDiscreteSystem& system,
                                     const SbpOperators<>& ops, double t0,
                                     const Vec<>& u0, double t_end, int n_steps,
                                     const NewtonConfig& cfg = {}) {
  if (n_steps < 1)
    throw std::invalid_argument("stdg_integrate: n_steps >= 1 required");
  StdgTrajectory traj;
  traj.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    traj.times[k] = t0 + (t_end - t0) * k / n_steps;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(u0);
  const double dt = (t_end - t0) / n_steps;
  for (int k = 0; k < n_steps; ++k) {
    StdgStepResult step =
        stdg_step(system, ops, traj.times[k], traj.states.back(), dt, cfg);
    traj.states.push_back(std::move(step.u_next));
    traj.element_solutions.push_back(std::move(step.U));
    traj.total_newton_iterations += step.newton_iterations;
  }
  return traj;
}

}  // namespace stdgsem
