#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "stdgsem/quadrature.hpp"

namespace stdgsem {

// Thrown when a model is evaluated at a nonphysical state; carries the state.
struct AdmissibilityError : std::runtime_error {
  Vec<> state;
  explicit AdmissibilityError(const std::string& what, Vec<> s)
      : std::runtime_error(what), state(std::move(s)) {}
};

// Model = bundle of flux/source callbacks; immutable after construction.
// F_c and F_v return r x d matrices (row = component, column = direction).
struct FluxModel {
  int r = 1;
  int d = 1;
  bool has_diffusion = false;
  bool linear = true;
  std::function<Mat<>(const Vec<>& u, const Vec<>& x, double t)> F_c;
  std::function<Mat<>(const Vec<>& u, const Mat<>& grad_u, const Vec<>& x,
                      double t)>
      F_v;
  std::function<Vec<>(const Vec<>& u, const Vec<>& x, double t)> S;
  std::function<double(const Vec<>& uL, const Vec<>& uR, const Vec<>& n,
                       const Vec<>& x, double t)>
      max_wave_speed;
};

using VelocityField = std::function<Vec<>(const Vec<>& x)>;

inline FluxModel advection_model(int d, const VelocityField& b, int r = 1) {
  FluxModel model;
  model.r = r;
  model.d = d;
  model.has_diffusion = false;
  model.linear = true;
  model.F_c = [b](const Vec<>& u, const Vec<>& x, double) {
    return (u * b(x).transpose()).eval();
  };
  model.F_v = [](const Vec<>& u, const Mat<>&, const Vec<>& x, double) {
    return Mat<>::Zero(u.size(), x.size()).eval();
  };
  model.S = [](const Vec<>& u, const Vec<>&, double) {
    return Vec<>::Zero(u.size()).eval();
  };
  model.max_wave_speed = [b](const Vec<>&, const Vec<>&, const Vec<>& n,
                             const Vec<>& x, double) {
    return std::abs(b(x).dot(n));
  };
  return model;
}

inline FluxModel advection_model(const Vec<>& b, int r = 1) {
  const Vec<> bv = b;
  return advection_model(
      int(b.size()), [bv](const Vec<>&) { return bv; }, r);
}

inline FluxModel advdiff_model(int d, const VelocityField& b, double eps) {
  if (eps < 0) throw std::invalid_argument("advdiff_model: need eps >= 0");
  FluxModel model = advection_model(d, b);
  model.has_diffusion = eps > 0;
  model.F_v = [eps](const Vec<>&, const Mat<>& grad_u, const Vec<>&, double) {
    return (eps * grad_u).eval();
  };
  return model;
}

// Rotating divergence-free velocity field of the pulse problem.
inline VelocityField rotating_field() {
  return [](const Vec<>& x) {
    Vec<> b(2);
    b << -4.0 * (x[1] - 0.5), 4.0 * (x[0] - 0.5);
    return b;
  };
}

struct EulerState {
  double rho = 1.0;
  Vec<> momentum;          // rho * v
  double total_energy = 1.0;  // energy density (conservative slot)

  Vec<> conservative() const {
    Vec<> u(2 + momentum.size());
    u[0] = rho;
    u.segment(1, momentum.size()) = momentum;
    u[u.size() - 1] = total_energy;
    return u;
  }
};

namespace detail {

inline double euler_pressure(const Vec<>& u, double gamma) {
  const int d = int(u.size()) - 2;
  const double rho = u[0];
  const double kinetic = u.segment(1, d).squaredNorm() / (2.0 * rho);
  return (gamma - 1.0) * (u[d + 1] - kinetic);
}

inline void require_admissible(const Vec<>& u, double gamma) {
  if (!(u[0] > 0.0) || !(euler_pressure(u, gamma) > 0.0))
    throw AdmissibilityError("euler_model: nonphysical state", u);
}

}  // namespace detail

// 2D compressible Euler equations; conservative state (rho, rho v1, rho v2, e).
inline FluxModel euler_model(double gamma = 1.4) {
  if (!(gamma > 1.0)) throw std::invalid_argument("euler_model: gamma > 1");
  FluxModel model;
  model.r = 4;
  model.d = 2;
  model.has_diffusion = false;
  model.linear = false;
  model.F_c = [gamma](const Vec<>& u, const Vec<>&, double) {
    detail::require_admissible(u, gamma);
    const double rho = u[0];
    const Vec<> v = u.segment(1, 2) / rho;
    const double P = detail::euler_pressure(u, gamma);
    const double e = u[3];
    Mat<> f(4, 2);
    for (int a = 0; a < 2; ++a) {
      f(0, a) = rho * v[a];
      for (int i = 0; i < 2; ++i)
        f(1 + i, a) = rho * v[i] * v[a] + (i == a ? P : 0.0);
      f(3, a) = (e + P) * v[a];
    }
    return f;
  };
  model.F_v = [](const Vec<>&, const Mat<>&, const Vec<>&, double) {
    return Mat<>::Zero(4, 2).eval();
  };
  model.S = [](const Vec<>&, const Vec<>&, double) {
    return Vec<>::Zero(4).eval();
  };
  model.max_wave_speed = [gamma](const Vec<>& uL, const Vec<>& uR,
                                 const Vec<>& n, const Vec<>&, double) {
    double lambda = 0.0;
    for (const Vec<>* u : {&uL, &uR}) {
      detail::require_admissible(*u, gamma);
      const double rho = (*u)[0];
      const Vec<> v = u->segment(1, 2) / rho;
      const double c = std::sqrt(gamma * detail::euler_pressure(*u, gamma) / rho);
      lambda = std::max(lambda, std::abs(v.dot(n)) + c);
    }
    return lambda;
  };
  return model;
}

// Analytic solution of the rotating-pulse advection-diffusion problem.
inline double rotating_pulse_exact(double t, double x, double y,
                                   double eps = 0.001) {
  const double x0 = x - 0.5, y0 = y - 0.5;
  const double xq = x0 * std::cos(4.0 * t) + y0 * std::sin(4.0 * t) + 0.25;
  const double yq = -x0 * std::sin(4.0 * t) + y0 * std::cos(4.0 * t);
  const double s2 = 0.004 + 4.0 * eps * t;
  return (0.004 / s2) * std::exp(-(xq * xq + yq * yq) / s2);
}

// Isentropic vortex initial data, evaluated exactly as printed.
inline EulerState vortex_initial(double x, double y, double Sv = 5.0,
                                 double M = 0.5, double gamma = 1.4) {
  const double pi = M_PI;
  const double f = 1.0 - x * x - y * y;
  const double rho_base = 1.0 - Sv * Sv * (gamma - 1.0) * M * M *
                                    std::exp(f) / (8.0 * pi * pi);
  if (!(rho_base > 0.0))
    throw AdmissibilityError("vortex_initial: density formula nonpositive",
                             (Vec<>(2) << x, y).finished());
  const double rho = std::pow(rho_base, 1.0 / (gamma - 1.0));
  const double v1 = 1.0 - Sv * y * std::exp(f / 2.0) / (2.0 * pi);
  const double v2 = Sv * x * std::exp(f / 2.0) / (2.0 * pi);
  const double P = std::pow(rho, gamma) / (gamma * M * M);
  EulerState state;
  state.rho = rho;
  state.momentum = (Vec<>(2) << rho * v1, rho * v2).finished();
  state.total_energy = P / (gamma - 1.0) + 0.5 * (v1 * v1 + v2 * v2) / rho;
  return state;
}

}  // namespace stdgsem
