#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stdgsem/newton.hpp"
#include "stdgsem/operators.hpp"
#include "stdgsem/system.hpp"

namespace stdgsem {

enum class JacobianForm { a_form, a_inv_form };

namespace detail {

// Inverse with a posteriori defect check <= 1e-10.
inline Mat<> checked_inverse(const Mat<>& A, const std::string& context) {
  const Mat<> I = Mat<>::Identity(A.rows(), A.cols());
  Mat<> inv = Eigen::PartialPivLU<Mat<>>(A).solve(I);
  if (!((A * inv - I).cwiseAbs().maxCoeff() <= 1e-10))
    throw std::runtime_error(context + ": singular matrix");
  return inv;
}

}  // namespace detail

struct RkStepResult {
  Vec<> u_next;
  std::vector<Vec<>> stages;
  int newton_iterations = 0;
  double t_next = 0.0;
};

// Stage-system Jacobian over the stacked unknowns (stage-major blocks).
// a_form blocks: delta_ij I - dt A_ij J_j; a_inv_form: (dt A)^-1_ij I -
// delta_ij J_i.
inline SparseMat stage_jacobian(const SemiDiscreteSystem& system,
                                const ButcherTableau<>& tab, double t,
                                const std::vector<Vec<>>& stages, double dt,
                                JacobianForm jac_form) {
  const int s = tab.s;
  if (int(stages.size()) != s)
    throw std::invalid_argument("stage_jacobian: expected " +
                                std::to_string(s) + " stage vectors");
  const int dof = int(stages[0].size());
  std::vector<Eigen::Triplet<double>> triplets;
  auto add_scaled_identity = [&](int bi, int bj, double value) {
    if (value == 0.0) return;
    for (int k = 0; k < dof; ++k)
      triplets.emplace_back(bi * dof + k, bj * dof + k, value);
  };
  auto add_scaled_block = [&](int bi, int bj, double value,
                              const SparseMat& J) {
    for (int k = 0; k < J.outerSize(); ++k)
      for (SparseMat::InnerIterator it(J, k); it; ++it)
        triplets.emplace_back(bi * dof + int(it.row()),
                              bj * dof + int(it.col()), value * it.value());
  };
  if (jac_form == JacobianForm::a_form) {
    for (int j = 0; j < s; ++j) {
      const SparseMat Jj = system.jacobian(t + tab.c[j] * dt, stages[j]);
      for (int i = 0; i < s; ++i) add_scaled_block(i, j, -dt * tab.A(i, j), Jj);
    }
    for (int i = 0; i < s; ++i) add_scaled_identity(i, i, 1.0);
  } else {
    const Mat<> Ainv = detail::checked_inverse(tab.A, "stage_jacobian");
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        add_scaled_identity(i, j, Ainv(i, j) / dt);
    for (int i = 0; i < s; ++i) {
      const SparseMat Ji = system.jacobian(t + tab.c[i] * dt, stages[i]);
      add_scaled_block(i, i, -1.0, Ji);
    }
  }
  SparseMat J(s * dof, s * dof);
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

// One implicit RK step: Newton on the stage system from guess U = 1 (x) u,
// then u_next = u + dt sum_j b_j F(t_j, U_j).
inline RkStepResult rk_step(const SemiDiscreteSystem& system,
                            const ButcherTableau<>& tab, double t,
                            const Vec<>& u, double dt,
                            const NewtonConfig& cfg = {},
                            JacobianForm jac_form = JacobianForm::a_form) {
  if (!(dt > 0)) throw std::invalid_argument("rk_step: dt > 0 required");
  const int s = tab.s;
  const int dof = int(u.size());
  std::optional<Mat<>> Ainv;
  if (jac_form == JacobianForm::a_inv_form)
    Ainv = detail::checked_inverse(tab.A, "rk_step");

  auto stage_of = [dof](const Vec<>& U, int j) {
    return U.segment(j * dof, dof);
  };
  auto residual = [&](const Vec<>& U) -> Vec<> {
    Mat<> F(dof, s);
    for (int j = 0; j < s; ++j)
      F.col(j) = system.rhs(t + tab.c[j] * dt, stage_of(U, j));
    Vec<> R(s * dof);
    for (int i = 0; i < s; ++i) {
      Vec<> block;
      if (jac_form == JacobianForm::a_form) {
        block = stage_of(U, i) - u;
        for (int j = 0; j < s; ++j) block -= dt * tab.A(i, j) * F.col(j);
      } else {
        block = -F.col(i);
        for (int j = 0; j < s; ++j)
          block += ((*Ainv)(i, j) / dt) * (stage_of(U, j) - u);
      }
      R.segment(i * dof, dof) = block;
    }
    return R;
  };
  auto jacobian = [&](const Vec<>& U) {
    std::vector<Vec<>> stages(s);
    for (int j = 0; j < s; ++j) stages[j] = stage_of(U, j);
    return stage_jacobian(system, tab, t, stages, dt, jac_form);
  };

  NewtonResult sol;
  try {
    sol = newton_solve(residual, jacobian, u.replicate(s, 1), cfg);
  } catch (const NonconvergenceError& err) {
    throw NonconvergenceError(
        "rk_step at t=" + detail::fmt_short(t) + ", dt=" +
            detail::fmt_short(dt) + ": " + err.what(),
        err.last_iterate, err.residual_history);
  }

  RkStepResult result;
  result.stages.resize(s);
  for (int j = 0; j < s; ++j) result.stages[j] = stage_of(sol.u, j);
  result.u_next = u;
  for (int j = 0; j < s; ++j)
    result.u_next +=
        dt * tab.b[j] * system.rhs(t + tab.c[j] * dt, result.stages[j]);
  result.newton_iterations = sol.iterations;
  result.t_next = t + dt;
  return result;
}

struct RkTrajectory {
  Vec<> times;
  std::vector<Vec<>> states;                        // n_steps + 1, states[0] = u0
  std::vector<std::vector<Vec<>>> stage_solutions;  // one block list per step
  int total_newton_iterations = 0;
};

inline RkTrajectory integrate(const SemiDiscreteSystem& system,
                              const ButcherTableau<>& tab, double t0,
                              const Vec<>& u0, double t_end, int n_steps,
                              const NewtonConfig& cfg = {},
                              JacobianForm jac_form = JacobianForm::a_form) {
  if (n_steps < 1)
    throw std::invalid_argument("integrate: n_steps >= 1 required");
  RkTrajectory traj;
  traj.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k)
    traj.times[k] = t0 + (t_end - t0) * k / n_steps;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(u0);
  const double dt = (t_end - t0) / n_steps;
  for (int k = 0; k < n_steps; ++k) {
    RkStepResult step =
        rk_step(system, tab, traj.times[k], traj.states.back(), dt, cfg,
                jac_form);
    traj.states.push_back(std::move(step.u_next));
    traj.stage_solutions.push_back(std::move(step.stages));
    traj.total_newton_iterations += step.newton_iterations;
  }
  return traj;
}

}  // namespace stdgsem
