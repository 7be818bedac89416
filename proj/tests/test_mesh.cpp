#include "doctest.h"

#include "stdgsem/mesh.hpp"

#include <cmath>

using namespace stdgsem;

namespace {

Mesh unit_interval(int cells) {
  Vec<> lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  Eigen::VectorXi nc(1);
  nc << cells;
  return uniform_mesh(1, lo, hi, nc);
}

Mesh unit_square(int cells) {
  Vec<> lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 1.0, 1.0;
  Eigen::VectorXi nc(2);
  nc << cells, cells;
  return uniform_mesh(2, lo, hi, nc);
}

}  // namespace

TEST_CASE("uniform_mesh spacing and periodic neighbors") {
  auto m1 = unit_interval(10);
  CHECK(m1.spacing[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m1.neighbor(9, 0, +1) == 0);
  CHECK(m1.neighbor(0, 0, -1) == 9);

  auto m2 = unit_square(25);
  CHECK(m2.spacing[0] == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(m2.spacing[1] == doctest::Approx(0.04).epsilon(1e-14));

  Vec<> lo(2), hi(2);
  lo << -10.0, -10.0;
  hi << 10.0, 10.0;
  Eigen::VectorXi nc(2);
  nc << 500, 500;
  auto big = uniform_mesh(2, lo, hi, nc);
  CHECK(big.spacing[0] == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(big.n_cells() == 250000);
}

TEST_CASE("uniform_mesh rejects bad input") {
  Vec<> lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  Eigen::VectorXi nc(1);
  nc << 0;
  CHECK_THROWS_AS(uniform_mesh(1, lo, hi, nc), std::invalid_argument);
  nc << 4;
  CHECK_THROWS_AS(uniform_mesh(1, hi, lo, nc), std::invalid_argument);
  CHECK_THROWS_AS(uniform_mesh(3, lo, hi, nc), std::invalid_argument);
}

TEST_CASE("neighbor map: right of left is identity") {
  auto m = unit_square(5);
  for (int cell = 0; cell < m.n_cells(); ++cell)
    for (int axis = 0; axis < 2; ++axis)
      CHECK(m.neighbor(m.neighbor(cell, axis, -1), axis, +1) == cell);
}

TEST_CASE("dg_space dof counts and node coordinates") {
  auto s1 = dg_space(unit_interval(10), 1);
  CHECK(s1.dof() == 20);
  CHECK(s1.node_coord(3, 0)[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(s1.node_coord(3, 1)[0] == doctest::Approx(0.4).epsilon(1e-14));

  auto s2 = dg_space(unit_interval(10), 2);
  CHECK(s2.node_coord(0, 1)[0] == doctest::Approx(0.05).epsilon(1e-14));

  auto s3 = dg_space(unit_square(4), 2, 3);
  CHECK(s3.dof() == 3 * 16 * 9);
  // Node (ix,iy) = (2,0) of cell (1,0): x = 0.5, y = 0.
  const int cell = s3.mesh.cell_index(1, 0);
  const int node = s3.node_index(2, 0);
  CHECK(s3.node_coord(cell, node)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s3.node_coord(cell, node)[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("coefficient layout is cell-lex, node-lex, component-innermost") {
  auto s = dg_space(unit_square(3), 1, 2);
  int expect = 0;
  for (int cell = 0; cell < s.mesh.n_cells(); ++cell)
    for (int node = 0; node < s.nodes_per_cell(); ++node)
      for (int comp = 0; comp < s.r; ++comp)
        CHECK(s.coeff_index(cell, node, comp) == expect++);
  CHECK(expect == s.dof());
}

TEST_CASE("global mass diagonal sums to domain measure times components") {
  for (int p : {1, 2, 3}) {
    auto mass1 = global_mass(dg_space(unit_interval(8), p));
    CHECK((mass1.diag.array() > 0.0).all());
    CHECK(mass1.diag.sum() == doctest::Approx(1.0).epsilon(1e-12));

    auto mass2 = global_mass(dg_space(unit_square(5), p, 4));
    CHECK(mass2.diag.sum() == doctest::Approx(4.0).epsilon(1e-12));
  }
  // Hand entry: 2x2 cells on [0,1]^2, p=2, center node weight (4/3)^2,
  // volume scale (0.5*0.5)/4.
  auto s = dg_space(unit_square(2), 2);
  auto mass = global_mass(s);
  CHECK(mass.diag[s.coeff_index(0, s.node_index(1, 1))] ==
        doctest::Approx(0.0625 * 16.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("interpolate nodal values") {
  auto s = dg_space(unit_interval(1), 1);
  auto constant = interpolate_scalar(s, [](const Vec<>&) { return 3.0; });
  CHECK((constant.coeffs.array() == 3.0).all());

  auto linear = interpolate_scalar(s, [](const Vec<>& x) { return x[0]; });
  CHECK(linear.coeffs[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(linear.coeffs[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("interpolation error of sin(2 pi x), 8 cells, p=3") {
  auto s = dg_space(unit_interval(8), 3);
  auto f = [](double x) { return std::sin(2.0 * M_PI * x); };
  auto field = interpolate_scalar(s, [&](const Vec<>& x) { return f(x[0]); });

  // Dense-quadrature oracle for the true L2 interpolation error.
  auto fine = lgl_rule(20);
  double err2 = 0.0;
  const double h = s.mesh.spacing[0];
  for (int cell = 0; cell < 8; ++cell) {
    Vec<> local(4);
    for (int node = 0; node < 4; ++node)
      local[node] = field.coeffs[s.coeff_index(cell, node)];
    for (int q = 0; q < fine.n; ++q) {
      const double x = (cell + 0.5 * (1.0 + fine.nodes[q])) * h;
      const double diff = eval_interpolant(s.basis, local, fine.nodes[q]) - f(x);
      err2 += 0.5 * h * fine.weights[q] * diff * diff;
    }
  }
  CHECK(std::sqrt(err2) < 1e-3);
  CHECK(std::sqrt(err2) > 1e-7);
}

TEST_CASE("l2_norm of constants equals the constant times sqrt(measure)") {
  auto zero = interpolate_scalar(dg_space(unit_interval(4), 2),
                                 [](const Vec<>&) { return 0.0; });
  CHECK(l2_norm(zero) == 0.0);

  auto one = interpolate_scalar(dg_space(unit_interval(4), 2),
                                [](const Vec<>&) { return 1.0; });
  CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-13));

  for (int p : {1, 2, 3}) {
    auto two = interpolate_scalar(dg_space(unit_square(3), p),
                                  [](const Vec<>&) { return 2.0; });
    CHECK(l2_norm(two) == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("l2_error basics") {
  auto exact = [](const Vec<>& x, double t) {
    return Vec<>::Constant(1, std::cos(x[0] + t)).eval();
  };
  auto s = dg_space(unit_interval(6), 2);
  auto field = interpolate(
      s, [&](const Vec<>& x) { return exact(x, 0.75); }, 0.75);
  CHECK(l2_error(field, exact, 0.75) <= 1e-14);

  auto flat = interpolate_scalar(s, [](const Vec<>&) { return 1.0; });
  auto shifted = [](const Vec<>&, double) {
    return Vec<>::Constant(1, 1.0 + 0.125).eval();
  };
  CHECK(l2_error(flat, shifted, 0.0) == doctest::Approx(0.125).epsilon(1e-13));
}
