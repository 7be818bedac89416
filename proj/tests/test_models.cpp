#include "doctest.h"

#include "stdgsem/models.hpp"
#include "stdgsem/system.hpp"

#include <cmath>

using namespace stdgsem;

namespace {
Vec<> v1(double a) { return (Vec<>(1) << a).finished(); }
Vec<> v2(double a, double b) { return (Vec<>(2) << a, b).finished(); }
}  // namespace

TEST_CASE("advection_model flux and wave speed") {
  auto model = advection_model(v1(1.0));
  CHECK(model.F_c(v1(2.0), v1(0.3), 0.0)(0, 0) == 2.0);
  CHECK(model.max_wave_speed(v1(2.0), v1(0.0), v1(1.0), v1(0.3), 0.0) == 1.0);
  CHECK(model.max_wave_speed(v1(2.0), v1(0.0), v1(-1.0), v1(0.3), 0.0) == 1.0);
  CHECK(model.S(v1(2.0), v1(0.3), 0.0)[0] == 0.0);
  CHECK_FALSE(model.has_diffusion);
  CHECK(model.linear);
}

TEST_CASE("rotating velocity field") {
  auto b = rotating_field();
  const Vec<> val = b(v2(1.0, 0.5));
  CHECK(val[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(val[1] == doctest::Approx(2.0).epsilon(1e-15));

  auto model = advection_model(2, b);
  const Mat<> f = model.F_c(v1(3.0), v2(1.0, 0.5), 0.0);
  CHECK(f(0, 0) == doctest::Approx(0.0));
  CHECK(f(0, 1) == doctest::Approx(6.0));
}

TEST_CASE("advdiff_model viscous flux") {
  auto model = advdiff_model(2, rotating_field(), 0.001);
  CHECK(model.has_diffusion);
  Mat<> grad(1, 2);
  grad << 3.0, -2.0;
  const Mat<> fv = model.F_v(v1(1.0), grad, v2(0.5, 0.5), 0.0);
  CHECK(fv(0, 0) == doctest::Approx(0.003).epsilon(1e-15));
  CHECK(fv(0, 1) == doctest::Approx(-0.002).epsilon(1e-15));
  CHECK(model.F_v(v1(1.0), Mat<>::Zero(1, 2), v2(0.5, 0.5), 0.0)
            .cwiseAbs()
            .maxCoeff() == 0.0);

  auto degenerate = advdiff_model(2, rotating_field(), 0.0);
  CHECK_FALSE(degenerate.has_diffusion);
  CHECK(degenerate.F_v(v1(1.0), grad, v2(0.5, 0.5), 0.0).cwiseAbs().maxCoeff() ==
        0.0);

  CHECK_THROWS_AS(advdiff_model(2, rotating_field(), -1e-3),
                  std::invalid_argument);
}

TEST_CASE("euler_model flux hand examples") {
  auto model = euler_model(1.4);
  Vec<> u(4);
  u << 1.0, 1.0, 0.0, 2.5;  // rho=1, v=(1,0), e=2.5 -> P=0.8
  const Mat<> f = model.F_c(u, v2(0, 0), 0.0);
  Vec<> f1(4), f2(4);
  f1 << 1.0, 1.8, 0.0, 3.3;
  f2 << 0.0, 0.0, 0.8, 0.0;
  CHECK((f.col(0) - f1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((f.col(1) - f2).cwiseAbs().maxCoeff() < 1e-14);

  Vec<> rest(4);
  rest << 1.0, 0.0, 0.0, 2.5;  // v=0 -> P=1
  const Mat<> frest = model.F_c(rest, v2(0, 0), 0.0);
  CHECK(frest(0, 0) == 0.0);
  CHECK(frest(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(frest(2, 0) == 0.0);
  CHECK(frest(3, 0) == 0.0);

  // Energy row of f1 is (e + P) v1 for any admissible state.
  Vec<> w(4);
  w << 2.0, 3.0, -1.0, 8.0;
  const double P = 0.4 * (8.0 - (9.0 + 1.0) / 4.0);
  CHECK(model.F_c(w, v2(0, 0), 0.0)(3, 0) ==
        doctest::Approx((8.0 + P) * 1.5).epsilon(1e-14));
}

TEST_CASE("euler_model wave speed and admissibility") {
  auto model = euler_model(1.4);
  Vec<> u(4);
  u << 1.0, 0.0, 0.0, 1.0 / (1.4 * 0.4);  // P = 1/gamma, c = 1
  CHECK(model.max_wave_speed(u, u, v2(1, 0), v2(0, 0), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));

  Vec<> moving(4);
  moving << 1.0, 2.0, 0.0, 1.0 / 0.56 + 2.0;  // v=(2,0), same P
  CHECK(model.max_wave_speed(moving, u, v2(1, 0), v2(0, 0), 0.0) ==
        doctest::Approx(3.0).epsilon(1e-14));

  Vec<> bad(4);
  bad << -1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(model.F_c(bad, v2(0, 0), 0.0), AdmissibilityError);
  Vec<> cold(4);
  cold << 1.0, 4.0, 0.0, 1.0;  // kinetic 8 > e -> P < 0
  CHECK_THROWS_AS(model.F_c(cold, v2(0, 0), 0.0), AdmissibilityError);
}

TEST_CASE("rotating_pulse_exact closed form") {
  CHECK(rotating_pulse_exact(0.0, 0.25, 0.5) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rotating_pulse_exact(0.0, 0.9, 0.9) < 1e-30);

  // Pulse center travels on the circle of radius 0.25 about (0.5, 0.5).
  for (double t : {0.1, 0.3, 1.0}) {
    const double xc = 0.5 - 0.25 * std::cos(4.0 * t);
    const double yc = 0.5 - 0.25 * std::sin(4.0 * t);
    const double s2 = 0.004 + 4.0 * 0.001 * t;
    CHECK(rotating_pulse_exact(t, xc, yc) ==
          doctest::Approx(0.004 / s2).epsilon(1e-12));
    // Nearby values are strictly smaller.
    CHECK(rotating_pulse_exact(t, xc + 0.01, yc) < rotating_pulse_exact(t, xc, yc));
  }
}

TEST_CASE("vortex_initial printed formulas") {
  auto center = vortex_initial(0.0, 0.0);
  CHECK(center.momentum[0] == doctest::Approx(center.rho).epsilon(1e-14));
  CHECK(center.momentum[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(center.rho > 0.75);
  CHECK(center.rho < 0.85);

  auto far = vortex_initial(9.9, 0.0);
  CHECK(far.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(far.momentum[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(far.momentum[1]) < 1e-12);
  // P = rho^gamma / (gamma M^2) -> 1/0.35 at rho = 1.
  const double P_far = 0.4 * (far.total_energy -
                              far.momentum.squaredNorm() / (2.0 * far.rho));
  CHECK(P_far == doctest::Approx(1.0 / 0.35).epsilon(1e-6));
}

TEST_CASE("vortex velocity perturbation is rotationally symmetric") {
  const double r = 1.3;
  double ref = -1.0;
  for (double phi : {0.0, 0.7, 1.9, 3.4, 5.1}) {
    auto s = vortex_initial(r * std::cos(phi), r * std::sin(phi));
    const double dv1 = s.momentum[0] / s.rho - 1.0;
    const double dv2 = s.momentum[1] / s.rho;
    const double speed = std::hypot(dv1, dv2);
    if (ref < 0)
      ref = speed;
    else
      CHECK(speed == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("vortex state is admissible for the Euler model on the domain") {
  auto model = euler_model(1.4);
  for (double x : {0.0, 0.5, 1.0, 3.0, 9.0})
    for (double y : {0.0, -0.5, 1.5, -8.0}) {
      const Vec<> u = vortex_initial(x, y).conservative();
      CHECK_NOTHROW(model.F_c(u, v2(x, y), 0.0));
    }
}

TEST_CASE("test_equation_system") {
  auto sys = test_equation_system();
  CHECK(sys.dof == 1);
  CHECK(sys.rhs(0.0, v1(4.0))[0] == -4.0);
  const SparseMat J = sys.jacobian(0.0, v1(4.0));
  CHECK(Mat<>(J)(0, 0) == -1.0);
  CHECK(test_equation_exact(1.0) == doctest::Approx(1.471517765).epsilon(1e-9));
  CHECK(test_equation_exact(0.0) == 4.0);
}
