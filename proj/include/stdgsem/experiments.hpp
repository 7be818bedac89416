#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stdgsem/csv.hpp"
#include "stdgsem/lodg.hpp"
#include "stdgsem/models.hpp"
#include "stdgsem/sparsity.hpp"
#include "stdgsem/spatial.hpp"
#include "stdgsem/stdg.hpp"

namespace stdgsem {

enum class Method { lodg, stdg };

inline std::string method_name(Method m) {
  return m == Method::lodg ? "lodg" : "stdg";
}

struct EocReport {
  std::string label;
  std::vector<int> Ns;
  std::vector<double> errors;
  std::vector<double> rates;  // length Ns.size() - 1
};

inline std::vector<double> eoc(const std::vector<int>& Ns,
                               const std::vector<double>& errors) {
  if (Ns.size() < 2 || Ns.size() != errors.size())
    throw std::invalid_argument("eoc: need >= 2 matched (N, error) pairs");
  std::vector<double> rates;
  for (size_t k = 0; k + 1 < Ns.size(); ++k) {
    if (!(errors[k] > 0) || !(errors[k + 1] > 0))
      throw std::invalid_argument("eoc: errors must be positive");
    rates.push_back(std::log(errors[k] / errors[k + 1]) /
                    std::log(double(Ns[k + 1]) / double(Ns[k])));
  }
  return rates;
}

enum class EocNorm { pointwise, l2_time };

// u' = -u, u(0) = 4 over (0, 1]; pointwise error at t = 1 or L2-in-time error
// of the temporal-node values.
inline EocReport run_eoc_testeq(Method method, int n_tau, EocNorm norm,
                                const std::vector<int>& N_list,
                                const NewtonConfig& cfg = {},
                                JacobianForm jac_form = JacobianForm::a_form) {
  auto sys = test_equation_system();
  const Vec<> u0 = Vec<>::Constant(1, 4.0);
  const auto rule = lgl_rule<double>(n_tau);
  EocReport report;
  report.label = method_name(method) + "_ntau" + std::to_string(n_tau) +
                 (norm == EocNorm::pointwise ? "_pointwise" : "_l2time");
  for (int N : N_list) {
    Vec<> times;
    std::vector<Vec<>> node_values(N);  // length-n_tau block per step
    double u_final = 0.0;
    if (method == Method::lodg) {
      auto traj = integrate(sys, lobatto_tableau<>(n_tau), 0.0, u0, 1.0, N,
                            cfg, jac_form);
      times = traj.times;
      u_final = traj.states.back()[0];
      for (int n = 0; n < N; ++n) {
        node_values[n].resize(n_tau);
        for (int j = 0; j < n_tau; ++j)
          node_values[n][j] = traj.stage_solutions[n][j][0];
      }
    } else {
      auto traj = stdg_integrate(sys, sbp_operators(n_tau), 0.0, u0, 1.0, N,
                                 cfg);
      times = traj.times;
      u_final = traj.states.back()[0];
      for (int n = 0; n < N; ++n) node_values[n] = traj.element_solutions[n];
    }
    double err;
    if (norm == EocNorm::pointwise) {
      err = std::abs(u_final - test_equation_exact(1.0));
    } else {
      const double dt = 1.0 / N;
      double acc = 0.0;
      for (int n = 0; n < N; ++n)
        for (int j = 0; j < n_tau; ++j) {
          const double t = times[n] + 0.5 * dt * (1.0 + rule.nodes[j]);
          const double d = node_values[n][j] - test_equation_exact(t);
          acc += 0.5 * dt * rule.weights[j] * d * d;
        }
      err = std::sqrt(acc);
    }
    report.Ns.push_back(N);
    report.errors.push_back(err);
  }
  report.rates = eoc(report.Ns, report.errors);
  return report;
}

inline void write_eoc_csv(const EocReport& report, const std::string& path) {
  auto out = open_csv(path, "eoc " + report.label);
  out << "n,error,rate\n";
  for (size_t k = 0; k < report.Ns.size(); ++k) {
    out << report.Ns[k] << "," << fmt_g(report.errors[k]) << ",";
    if (k > 0) out << fmt_g(report.rates[k - 1]);
    out << "\n";
  }
}

struct AdvdiffResult {
  int N = 0;
  int n_steps = 0;
  double dt = 0.0;
  double l2_error_final = 0.0;
  double runtime_seconds = 0.0;
  int total_newton_iterations = 0;
  DgSpace space;
  Vec<> final_state;
};

// Rotating Gaussian pulse under advection-diffusion on the periodic unit
// square to T = 1; spatial order p = n_tau - 1; dt = 1/N unless overridden.
inline AdvdiffResult run_advdiff(Method method, int n_tau, int N,
                                 std::optional<double> dt_fixed = std::nullopt,
                                 std::optional<int> steps = std::nullopt,
                                 const NewtonConfig& cfg = {},
                                 JacobianForm jac_form = JacobianForm::a_form) {
  if (N < 2) throw std::invalid_argument("run_advdiff: N >= 2 required");
  const double eps = 0.001;
  const int p = n_tau - 1;
  auto mesh = uniform_mesh(2, Vec<>::Zero(2), Vec<>::Ones(2),
                           Eigen::VectorXi::Constant(2, N));
  auto system =
      assemble_semidiscrete(dg_space(mesh, p), advdiff_model(2, rotating_field(), eps));
  const Vec<> u0 =
      interpolate_scalar(system.space, [eps](const Vec<>& x) {
        return rotating_pulse_exact(0.0, x[0], x[1], eps);
      }).coeffs;

  AdvdiffResult result;
  result.N = N;
  result.n_steps = steps ? *steps
                         : (dt_fixed ? std::max(1, int(std::llround(1.0 / *dt_fixed)))
                                     : N);
  result.dt = 1.0 / result.n_steps;
  const auto tic = std::chrono::steady_clock::now();
  if (method == Method::lodg) {
    auto traj = integrate(system, lobatto_tableau<>(n_tau), 0.0, u0, 1.0,
                          result.n_steps, cfg, jac_form);
    result.final_state = traj.states.back();
    result.total_newton_iterations = traj.total_newton_iterations;
  } else {
    auto traj = stdg_integrate(system, sbp_operators(n_tau), 0.0, u0, 1.0,
                               result.n_steps, cfg);
    result.final_state = traj.states.back();
    result.total_newton_iterations = traj.total_newton_iterations;
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
          .count();
  DiscreteField field{system.space, result.final_state, 1.0};
  result.l2_error_final = l2_error(
      field,
      [eps](const Vec<>& x, double t) {
        return Vec<>::Constant(1, rotating_pulse_exact(t, x[0], x[1], eps))
            .eval();
      },
      1.0);
  result.space = system.space;
  return result;
}

struct EulerVortexResult {
  double l2_density_error = 0.0;
  double min_density = 0.0;
  int max_newton_per_step = 0;
  int total_newton_iterations = 0;
  double runtime_seconds = 0.0;
  double t_final = 0.0;
  DgSpace space;
  Vec<> final_state;
};

// Isentropic vortex on the periodic square [-10,10]^2; the exact solution is
// the initial profile translated by (t, 0).
inline EulerVortexResult run_euler_vortex(Method method, int n_tau,
                                          int cells_per_dim, double dt,
                                          int n_steps,
                                          const NewtonConfig& cfg = {},
                                          int p = 1,
                                          bool allow_large = false,
                                          JacobianForm jac_form = JacobianForm::a_form) {
  if (cells_per_dim > 32 && !allow_large)
    throw std::invalid_argument(
        "run_euler_vortex: cells_per_dim > 32 requires allow_large");
  if (n_steps < 0)
    throw std::invalid_argument("run_euler_vortex: n_steps >= 0");
  auto mesh = uniform_mesh(2, Vec<>::Constant(2, -10.0),
                           Vec<>::Constant(2, 10.0),
                           Eigen::VectorXi::Constant(2, cells_per_dim));
  auto system = assemble_semidiscrete(dg_space(mesh, p, 4), euler_model());
  const auto& space = system.space;
  Vec<> u = interpolate(space, [](const Vec<>& x) {
              return vortex_initial(x[0], x[1]).conservative();
            }).coeffs;

  EulerVortexResult result;
  auto min_rho = [&](const Vec<>& state) {
    double m = std::numeric_limits<double>::infinity();
    for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
      for (int node = 0; node < space.nodes_per_cell(); ++node)
        m = std::min(m, state[space.coeff_index(cell, node, 0)]);
    return m;
  };
  result.min_density = min_rho(u);

  const auto ops = sbp_operators(n_tau);
  const auto tab = lobatto_tableau<>(n_tau);
  const auto tic = std::chrono::steady_clock::now();
  double t = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    int iters;
    if (method == Method::lodg) {
      auto step = rk_step(system, tab, t, u, dt, cfg, jac_form);
      u = std::move(step.u_next);
      iters = step.newton_iterations;
    } else {
      auto step = stdg_step(system, ops, t, u, dt, cfg);
      u = std::move(step.u_next);
      iters = step.newton_iterations;
    }
    t += dt;
    result.total_newton_iterations += iters;
    result.max_newton_per_step = std::max(result.max_newton_per_step, iters);
    result.min_density = std::min(result.min_density, min_rho(u));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
          .count();

  const GlobalMassDiagonal mass = global_mass(space);
  double acc = 0.0;
  for (int cell = 0; cell < space.mesh.n_cells(); ++cell)
    for (int node = 0; node < space.nodes_per_cell(); ++node) {
      const Vec<> x = space.node_coord(cell, node);
      double xb = x[0] - t;  // translate back, wrap into [-10, 10)
      xb -= 20.0 * std::floor((xb + 10.0) / 20.0);
      const double rho_exact = vortex_initial(xb, x[1]).rho;
      const int idx = space.coeff_index(cell, node, 0);
      acc += mass.diag[idx] * (u[idx] - rho_exact) * (u[idx] - rho_exact);
    }
  result.l2_density_error = std::sqrt(acc);
  result.t_final = t;
  result.space = space;
  result.final_state = std::move(u);
  return result;
}

enum class SparsityForm { st, a_form, a_inv_form, a_inv_permuted };

inline std::string sparsity_form_name(SparsityForm form) {
  switch (form) {
    case SparsityForm::st: return "st";
    case SparsityForm::a_form: return "a";
    case SparsityForm::a_inv_form: return "ainv";
    default: return "ainv-permuted";
  }
}

// Jacobian pattern of u_t + u_x = 0 on one periodic space-time element.
// The space-time form and the permuted A-inverse form are rendered in the
// vertex -> edge -> interior lattice order; the stage forms stay stage-major.
inline SparsityPattern sparsity_pattern_advection(int p, int n_tau,
                                                  SparsityForm form) {
  if (p < 1 || p > 3)
    throw std::invalid_argument("sparsity_pattern_advection: p in {1,2,3}");
  auto mesh = uniform_mesh(1, Vec<>::Zero(1), Vec<>::Ones(1),
                           Eigen::VectorXi::Constant(1, 1));
  auto system =
      assemble_semidiscrete(dg_space(mesh, p), advection_model(Vec<>::Ones(1)));
  const int dof = system.dof;
  const double dt = 0.1;
  const auto lattice =
      time_lex_permutation(n_tau, dof, NodeOrder::dune_like);
  if (form == SparsityForm::st) {
    TimeElementSystem elem{system, sbp_operators(n_tau), 0.0, dt,
                           Vec<>::Zero(dof)};
    const auto pattern =
        sparsity_of(st_jacobian(elem, Vec<>::Zero(n_tau * dof)));
    return permute_pattern(pattern, lattice);
  }
  std::vector<Vec<>> stages(n_tau, Vec<>::Zero(dof));
  const JacobianForm jf = form == SparsityForm::a_form
                              ? JacobianForm::a_form
                              : JacobianForm::a_inv_form;
  const auto pattern = sparsity_of(
      stage_jacobian(system, lobatto_tableau<>(n_tau), 0.0, stages, dt, jf));
  if (form == SparsityForm::a_inv_permuted)
    return permute_pattern(pattern, lattice);
  return pattern;
}

// Writes <out_dir>/sparsity_p<p>_ntau<n_tau>_<form>.{pbm,csv}.
inline SparsityPattern dump_sparsity(int p, int n_tau, SparsityForm form,
                                     const std::string& out_dir) {
  const SparsityPattern pattern = sparsity_pattern_advection(p, n_tau, form);
  std::filesystem::create_directories(out_dir);
  const std::string stem = out_dir + "/sparsity_p" + std::to_string(p) +
                           "_ntau" + std::to_string(n_tau) + "_" +
                           sparsity_form_name(form);
  write_pbm(pattern, stem + ".pbm");
  write_pattern_csv(pattern, stem + ".csv",
                    "sparsity " + sparsity_form_name(form));
  return pattern;
}

}  // namespace stdgsem
