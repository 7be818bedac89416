#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stdgsem/system.hpp"

namespace stdgsem {

namespace detail {

inline std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::string(buf);
}

}  // namespace detail

enum class LinearMethod { auto_select, dense_lu, sparse_lu, gmres };

struct NewtonConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 50;
  LinearMethod linear = LinearMethod::auto_select;
  int gmres_restart = 30;
  double gmres_tol = 1e-12;
  int gmres_max_it = 1000;
};

struct NonconvergenceError : std::runtime_error {
  Vec<> last_iterate;
  std::vector<double> residual_history;
  NonconvergenceError(const std::string& what, Vec<> u,
                      std::vector<double> history)
      : std::runtime_error(what),
        last_iterate(std::move(u)),
        residual_history(std::move(history)) {}
};

// Direct solves are verified a posteriori: ||Ax-b||_inf <= 1e-10 (1+||b||_inf).
inline Vec<> linear_solve(const SparseMat& A, const Vec<>& b,
                          const NewtonConfig& cfg = {}) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("linear_solve: dimension mismatch");
  LinearMethod method = cfg.linear;
  if (method == LinearMethod::auto_select)
    method = b.size() < 600 ? LinearMethod::dense_lu : LinearMethod::sparse_lu;

  Vec<> x;
  if (method == LinearMethod::dense_lu) {
    x = Eigen::PartialPivLU<Mat<>>(Mat<>(A)).solve(b);
  } else if (method == LinearMethod::sparse_lu) {
    Eigen::SparseLU<SparseMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("linear_solve: sparse LU factorization failed");
    x = lu.solve(b);
  } else {
    Eigen::GMRES<SparseMat> gmres(A);
    gmres.set_restart(cfg.gmres_restart);
    gmres.setTolerance(cfg.gmres_tol);
    gmres.setMaxIterations(cfg.gmres_max_it);
    x = gmres.solve(b);
    if (gmres.info() != Eigen::Success)
      throw std::runtime_error("linear_solve: GMRES did not converge, error " +
                               detail::fmt_short(gmres.error()));
    return x;
  }
  const double defect = (A * x - b).cwiseAbs().maxCoeff();
  const double gate = 1e-10 * (1.0 + b.cwiseAbs().maxCoeff());
  if (!(defect <= gate))
    throw std::runtime_error(
        "linear_solve: direct solve defect " + detail::fmt_short(defect) +
        " exceeds " + detail::fmt_short(gate) + " (matrix near-singular)");
  return x;
}

inline Vec<> linear_solve(const Mat<>& A, const Vec<>& b,
                          const NewtonConfig& cfg = {}) {
  return linear_solve(SparseMat(A.sparseView()), b, cfg);
}

struct NewtonResult {
  Vec<> u;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
};

// Full-step Newton, Jacobian refreshed every iteration; iteration count =
// number of linear solves.
inline NewtonResult newton_solve(
    const std::function<Vec<>(const Vec<>&)>& residual,
    const std::function<SparseMat(const Vec<>&)>& jacobian, const Vec<>& u0,
    const NewtonConfig& cfg = {}) {
  NewtonResult result;
  result.u = u0;
  Vec<> res = residual(result.u);
  double norm = res.cwiseAbs().maxCoeff();
  const double norm0 = norm;
  result.residual_history.push_back(norm);
  auto converged = [&](double r) {
    return r <= cfg.abs_tol || r <= cfg.rel_tol * norm0;
  };
  while (!converged(norm)) {
    if (result.iterations >= cfg.max_iter)
      throw NonconvergenceError(
          "newton_solve: no convergence in " + std::to_string(cfg.max_iter) +
              " iterations, residual " + detail::fmt_short(norm),
          result.u, result.residual_history);
    const SparseMat J = jacobian(result.u);
    result.u += linear_solve(J, (-res).eval(), cfg);
    ++result.iterations;
    res = residual(result.u);
    norm = res.cwiseAbs().maxCoeff();
    result.residual_history.push_back(norm);
  }
  result.final_residual = norm;
  return result;
}

}  // namespace stdgsem
