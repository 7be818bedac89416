#include "doctest.h"

#include "stdgsem/spatial.hpp"

#include <cmath>
#include <random>

using namespace stdgsem;

namespace {

Mesh interval(double a, double b, int cells) {
  Vec<> lo(1), hi(1);
  lo << a;
  hi << b;
  Eigen::VectorXi nc(1);
  nc << cells;
  return uniform_mesh(1, lo, hi, nc);
}

Mesh square(double a, double b, int cells) {
  Vec<> lo(2), hi(2);
  lo << a, a;
  hi << b, b;
  Eigen::VectorXi nc(2);
  nc << cells, cells;
  return uniform_mesh(2, lo, hi, nc);
}

Vec<> sv(double a) { return (Vec<>(1) << a).finished(); }

int coeff_cell(const DgSpace& space, int coeff) {
  return coeff / (space.nodes_per_cell() * space.r);
}

}  // namespace

TEST_CASE("llf_flux consistency, upwinding, antisymmetry") {
  auto model = advection_model(sv(1.0));
  CHECK(llf_flux(model, sv(2.0), sv(2.0), sv(1.0), sv(0.0), 0.0)[0] == 2.0);
  CHECK(llf_flux(model, sv(2.0), sv(0.0), sv(1.0), sv(0.0), 0.0)[0] == 2.0);

  auto euler = euler_model(1.4);
  Vec<> uL(4), uR(4), n(2), x(2);
  uL << 1.0, 0.3, -0.2, 2.5;
  uR << 1.2, -0.1, 0.4, 3.0;
  n << 0.0, 1.0;
  x << 0.0, 0.0;
  const Vec<> H = llf_flux(euler, uL, uR, n, x, 0.0);
  const Vec<> Hflip = llf_flux(euler, uR, uL, (-n).eval(), x, 0.0);
  CHECK((H + Hflip).cwiseAbs().maxCoeff() < 1e-14);
  const Vec<> Hcons = llf_flux(euler, uL, uL, n, x, 0.0);
  CHECK((Hcons - euler.F_c(uL, x, 0.0) * n).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("single periodic cell, p=1, advection b=1: hand-assembled operator") {
  auto sys = assemble_semidiscrete(dg_space(interval(0.0, 1.0, 1), 1),
                                   advection_model(sv(1.0)));
  Mat<> Aref(2, 2);
  Aref << -1.0, 1.0, 1.0, -1.0;
  for (Vec<> u : {(Vec<>(2) << 1.0, 0.0).finished(),
                  (Vec<>(2) << 0.3, -0.7).finished()}) {
    CHECK((sys.rhs(0.0, u) - Aref * u).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("free-stream preservation") {
  auto adv1 = assemble_semidiscrete(dg_space(interval(0.0, 1.0, 6), 2),
                                    advection_model(sv(1.5)));
  Vec<> c1 = Vec<>::Constant(adv1.dof, 2.5);
  CHECK(adv1.rhs(0.0, c1).cwiseAbs().maxCoeff() <= 1e-12);

  auto pulse = assemble_semidiscrete(
      dg_space(square(0.0, 1.0, 5), 3),
      advdiff_model(2, rotating_field(), 0.001));
  Vec<> c2 = Vec<>::Constant(pulse.dof, -0.6);
  CHECK(pulse.rhs(0.0, c2).cwiseAbs().maxCoeff() <= 1e-12);

  auto euler = assemble_semidiscrete(dg_space(square(-10.0, 10.0, 4), 1, 4),
                                     euler_model(1.4));
  Vec<> c3(euler.dof);
  for (int i = 0; i < euler.dof; i += 4) {
    c3[i] = 1.0;
    c3[i + 1] = 0.3;
    c3[i + 2] = -0.2;
    c3[i + 3] = 2.5;
  }
  CHECK(euler.rhs(0.0, c3).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("conservation: mass-weighted rhs sums to zero per component") {
  auto check_conservation = [](const SemiDiscreteSystem& sys, const Vec<>& u) {
    const Vec<> mrhs = global_mass(sys.space).diag.cwiseProduct(sys.rhs(0.0, u));
    for (int comp = 0; comp < sys.space.r; ++comp) {
      double total = 0.0;
      for (int i = comp; i < sys.dof; i += sys.space.r) total += mrhs[i];
      CHECK(std::abs(total) <= 1e-11);
    }
  };

  auto adv = assemble_semidiscrete(dg_space(interval(0.0, 1.0, 7), 2),
                                   advection_model(sv(1.0)));
  check_conservation(adv, interpolate_scalar(adv.space, [](const Vec<>& x) {
                       return std::sin(2 * M_PI * x[0]) + 0.2;
                     }).coeffs);

  auto pulse = assemble_semidiscrete(
      dg_space(square(0.0, 1.0, 6), 2),
      advdiff_model(2, rotating_field(), 0.001));
  check_conservation(pulse, interpolate_scalar(pulse.space, [](const Vec<>& x) {
                       return rotating_pulse_exact(0.0, x[0], x[1]);
                     }).coeffs);

  auto euler = assemble_semidiscrete(dg_space(square(-10.0, 10.0, 4), 2, 4),
                                     euler_model(1.4));
  check_conservation(euler, interpolate(euler.space, [](const Vec<>& x) {
                       return vortex_initial(x[0], x[1]).conservative();
                     }).coeffs);
}

TEST_CASE("2D constant-b advection of an x-only profile matches the 1D operator") {
  const int cells = 5, p = 2;
  auto f = [](double x) { return std::sin(2 * M_PI * x) + 0.3 * x * x; };

  auto sys1 = assemble_semidiscrete(dg_space(interval(0.0, 1.0, cells), p),
                                    advection_model(sv(1.0)));
  auto u1 = interpolate_scalar(sys1.space, [&](const Vec<>& x) { return f(x[0]); });
  const Vec<> r1 = sys1.rhs(0.0, u1.coeffs);

  auto sys2 = assemble_semidiscrete(dg_space(square(0.0, 1.0, cells), p),
                                    advection_model((Vec<>(2) << 1.0, 0.0).finished()));
  auto u2 = interpolate_scalar(sys2.space, [&](const Vec<>& x) { return f(x[0]); });
  const Vec<> r2 = sys2.rhs(0.0, u2.coeffs);

  const auto& s2 = sys2.space;
  for (int cy = 0; cy < cells; ++cy)
    for (int cx = 0; cx < cells; ++cx)
      for (int iy = 0; iy <= p; ++iy)
        for (int ix = 0; ix <= p; ++ix) {
          const double v2 =
              r2[s2.coeff_index(s2.mesh.cell_index(cx, cy), s2.node_index(ix, iy))];
          const double v1 = r1[sys1.space.coeff_index(cx, ix)];
          CHECK(std::abs(v2 - v1) < 1e-12);
        }
}

TEST_CASE("rhs consistency order for smooth advection") {
  auto err_at = [](int cells) {
    auto sys = assemble_semidiscrete(dg_space(interval(0.0, 1.0, cells), 2),
                                     advection_model(sv(1.0)));
    auto u = interpolate_scalar(sys.space, [](const Vec<>& x) {
      return std::sin(2 * M_PI * x[0]);
    });
    DiscreteField res = u;
    res.coeffs = sys.rhs(0.0, u.coeffs) -
                 interpolate_scalar(sys.space, [](const Vec<>& x) {
                   return -2 * M_PI * std::cos(2 * M_PI * x[0]);
                 }).coeffs;
    return l2_norm(res);
  };
  // The raw truncation residual converges at O(h^p); superconvergence to
  // p+1 belongs to the evolved solution, not to this residual.
  const double e8 = err_at(8), e16 = err_at(16);
  CHECK(e16 < 0.05);
  CHECK(e8 / e16 > 3.5);
  CHECK(e8 / e16 < 4.5);
}

TEST_CASE("rhs consistency against the analytic pulse time derivative") {
  auto err_at = [](int cells) {
    auto sys = assemble_semidiscrete(
        dg_space(square(0.0, 1.0, cells), 3),
        advdiff_model(2, rotating_field(), 0.001));
    auto u = interpolate_scalar(sys.space, [](const Vec<>& x) {
      return rotating_pulse_exact(0.0, x[0], x[1]);
    });
    const double dt = 1e-6;
    DiscreteField res = u;
    res.coeffs = sys.rhs(0.0, u.coeffs) -
                 interpolate_scalar(sys.space, [&](const Vec<>& x) {
                   return (rotating_pulse_exact(dt, x[0], x[1]) -
                           rotating_pulse_exact(-dt, x[0], x[1])) /
                          (2 * dt);
                 }).coeffs;
    return l2_norm(res);
  };
  // N=16 -> 32 is still pre-asymptotic for the narrow pulse; the O(h^p)
  // regime sets in from N=32 on.
  const double e32 = err_at(32), e64 = err_at(64);
  CHECK(e32 / e64 > 6.0);
  CHECK(e64 < 2e-3);
}

TEST_CASE("solution EOC under near-exact time integration is at least p+1/2") {
  // Advect sin(2 pi x) for a short time with fine RK4 steps so the time
  // error is negligible against the spatial error.
  auto solve_error = [](int cells, int p) {
    auto sys = assemble_semidiscrete(dg_space(interval(0.0, 1.0, cells), p),
                                     advection_model(sv(1.0)));
    Vec<> u = interpolate_scalar(sys.space, [](const Vec<>& x) {
                return std::sin(2 * M_PI * x[0]);
              }).coeffs;
    const double t_end = 0.0625;
    const int steps = std::max(32, cells * (2 * p + 1));
    const double dt = t_end / steps;
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
      const Vec<> k1 = sys.rhs(t, u);
      const Vec<> k2 = sys.rhs(t + dt / 2, u + (dt / 2) * k1);
      const Vec<> k3 = sys.rhs(t + dt / 2, u + (dt / 2) * k2);
      const Vec<> k4 = sys.rhs(t + dt, u + dt * k3);
      u += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      t += dt;
    }
    DiscreteField field{sys.space, u, t_end};
    return l2_error(
        field,
        [&](const Vec<>& x, double tt) {
          return Vec<>::Constant(1, std::sin(2 * M_PI * (x[0] - tt))).eval();
        },
        t_end);
  };
  for (int p : {1, 2, 3}) {
    const double e1 = solve_error(8, p), e2 = solve_error(16, p);
    const double order = std::log2(e1 / e2);
    CHECK(order >= p + 0.45);
  }
}

TEST_CASE("interior_penalty_surface sign pattern") {
  auto model = advdiff_model(1, [](const Vec<>&) { return sv(0.0); }, 1.0);
  const double h_e = 0.5, eta = 10.0;
  const Vec<> n = sv(1.0), x = sv(0.5);

  // Pure jump: penalty (eta/h_e)[u] enters + into the left residual, - right.
  auto jump = interior_penalty_surface(model, sv(1.0), sv(0.0),
                                       Mat<>::Zero(1, 1), Mat<>::Zero(1, 1), n,
                                       x, 0.0, h_e, eta);
  CHECK(jump.trace_L[0] == doctest::Approx(eta / h_e).epsilon(1e-14));
  CHECK(jump.trace_R[0] == doctest::Approx(-eta / h_e).epsilon(1e-14));
  CHECK(jump.sym[0] == doctest::Approx(-0.5).epsilon(1e-14));

  // Continuous linear profile: reduces to the consistent flux eps grad(u).n.
  Mat<> g(1, 1);
  g << 3.0;
  auto smooth = interior_penalty_surface(model, sv(0.7), sv(0.7), g, g, n, x,
                                         0.0, h_e, eta);
  CHECK(smooth.sym[0] == 0.0);
  CHECK(smooth.trace_L[0] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(smooth.trace_R[0] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("the interior-penalty terms dissipate the discrete energy") {
  auto sys = assemble_semidiscrete(
      dg_space(interval(0.0, 1.0, 4), 2),
      advdiff_model(1, [](const Vec<>&) { return sv(0.0); }, 0.01));
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Vec<> u(sys.dof);
    for (int i = 0; i < sys.dof; ++i) u[i] = dist(gen);
    const double rate =
        u.dot(global_mass(sys.space).diag.cwiseProduct(sys.rhs(0.0, u)));
    CHECK(rate <= 1e-12);
  }
}

TEST_CASE("spatial jacobian of linear models is exact and state-independent") {
  auto sys = assemble_semidiscrete(dg_space(interval(0.0, 1.0, 6), 1),
                                   advection_model(sv(1.0)));
  auto u = interpolate_scalar(sys.space, [](const Vec<>& x) {
    return std::cos(2 * M_PI * x[0]);
  });
  const SparseMat J = sys.jacobian(0.0, u.coeffs);
  CHECK((J * u.coeffs - sys.rhs(0.0, u.coeffs)).cwiseAbs().maxCoeff() < 1e-12);

  const SparseMat J2 = spatial_jacobian(sys.space, sys.model, sys.rhs, 0.0,
                                        Vec<>::Constant(sys.dof, 0.8));
  CHECK(Mat<>(J - J2).cwiseAbs().maxCoeff() < 1e-13);

  auto pulse = assemble_semidiscrete(
      dg_space(square(0.0, 1.0, 4), 2),
      advdiff_model(2, rotating_field(), 0.001));
  auto up = interpolate_scalar(pulse.space, [](const Vec<>& x) {
    return rotating_pulse_exact(0.0, x[0], x[1]);
  });
  const SparseMat Jp = pulse.jacobian(0.0, up.coeffs);
  const Vec<> lin = Jp * up.coeffs;
  const Vec<> ref = pulse.rhs(0.0, up.coeffs);
  CHECK((lin - ref).cwiseAbs().maxCoeff() < 1e-12 * (1 + ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("jacobian block sparsity: one-ring of face neighbors") {
  auto sys = assemble_semidiscrete(dg_space(interval(0.0, 1.0, 8), 2),
                                   advection_model(sv(1.0)));
  const SparseMat J = sys.jacobian(0.0, Vec<>::Zero(sys.dof));
  for (int k = 0; k < J.outerSize(); ++k)
    for (SparseMat::InnerIterator it(J, k); it; ++it) {
      const int rc = coeff_cell(sys.space, int(it.row()));
      const int cc = coeff_cell(sys.space, int(it.col()));
      const bool adjacent = rc == cc ||
                            sys.space.mesh.neighbor(cc, 0, +1) == rc ||
                            sys.space.mesh.neighbor(cc, 0, -1) == rc;
      CHECK(adjacent);
    }
}

TEST_CASE("euler jacobian against a directional finite difference") {
  auto sys = assemble_semidiscrete(dg_space(square(-10.0, 10.0, 4), 1, 4),
                                   euler_model(1.4));
  auto u0 = interpolate(sys.space, [](const Vec<>& x) {
    return vortex_initial(x[0], x[1]).conservative();
  });
  const SparseMat J = sys.jacobian(0.0, u0.coeffs);

  std::mt19937 gen(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec<> v(sys.dof);
  for (int i = 0; i < sys.dof; ++i) v[i] = dist(gen);

  const double h = 1e-6;
  const Vec<> fd = (sys.rhs(0.0, u0.coeffs + h * v) -
                    sys.rhs(0.0, u0.coeffs - h * v)) /
                   (2 * h);
  const Vec<> Jv = J * v;
  CHECK((fd - Jv).cwiseAbs().maxCoeff() <= 1e-5 * Jv.cwiseAbs().maxCoeff());
}

TEST_CASE("assemble_semidiscrete rejects inconsistent inputs") {
  CHECK_THROWS_AS(assemble_semidiscrete(dg_space(interval(0.0, 1.0, 4), 1),
                                        euler_model(1.4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      assemble_semidiscrete(dg_space(square(0.0, 1.0, 4), 0),
                            advdiff_model(2, rotating_field(), 0.001)),
      std::invalid_argument);
}
