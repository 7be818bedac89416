#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace stdgsem {

template <typename Scalar = double>
using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar = double>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Legendre-Gauss-Lobatto rule on [-1,1]: endpoints included, interior nodes
// are the roots of P'_{n-1}, weights w_i = 2 / (n(n-1) P_{n-1}(tau_i)^2).
// Exact for polynomials of degree <= 2n-3.
template <typename Scalar = double>
struct QuadratureRule {
  int n = 0;
  Vec<Scalar> nodes;
  Vec<Scalar> weights;
};

template <typename Scalar = double>
struct LagrangeBasis {
  QuadratureRule<Scalar> rule;
  Vec<Scalar> barycentric_weights;
};

namespace detail {

// P_m(x) and P_{m-1}(x) by the three-term recurrence.
template <typename Scalar>
void legendre_pair(int m, Scalar x, Scalar& pm, Scalar& pm1) {
  pm = Scalar(1);
  pm1 = Scalar(0);
  for (int k = 0; k < m; ++k) {
    const Scalar next =
        ((2 * k + 1) * x * pm - Scalar(k) * pm1) / Scalar(k + 1);
    pm1 = pm;
    pm = next;
  }
}

template <typename Scalar>
Scalar legendre(int m, Scalar x) {
  Scalar pm, pm1;
  legendre_pair(m, x, pm, pm1);
  return pm;
}

// P'_m and P''_m at interior points, via m(x P_m - P_{m-1})/(x^2-1) and the
// Legendre differential equation.
template <typename Scalar>
void legendre_derivs(int m, Scalar x, Scalar& dp, Scalar& ddp) {
  Scalar pm, pm1;
  legendre_pair(m, x, pm, pm1);
  const Scalar x2m1 = x * x - Scalar(1);
  dp = Scalar(m) * (x * pm - pm1) / x2m1;
  ddp = (Scalar(2) * x * dp - Scalar(m * (m + 1)) * pm) / (-x2m1);
}

}  // namespace detail

template <typename Scalar = double>
QuadratureRule<Scalar> lgl_rule(int n) {
  if (n < 2) throw std::invalid_argument("lgl_rule: need n >= 2 nodes");
  QuadratureRule<Scalar> rule;
  rule.n = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.nodes[0] = Scalar(-1);
  rule.nodes[n - 1] = Scalar(1);

  const int m = n - 1;  // interior nodes are roots of P'_m
  const Scalar pi = Scalar(3.14159265358979323846L);
  for (int i = 1; i < n - 1; ++i) {
    // Chebyshev-Gauss-Lobatto initial guess, ordered left to right.
    Scalar x = -std::cos(pi * Scalar(i) / Scalar(m));
    for (int it = 0; it < 100; ++it) {
      Scalar dp, ddp;
      detail::legendre_derivs(m, x, dp, ddp);
      const Scalar dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-15)) break;
    }
    rule.nodes[i] = x;
  }
  // Enforce exact symmetry about 0.
  for (int i = 0; i < n; ++i) {
    const Scalar sym = (rule.nodes[i] - rule.nodes[n - 1 - i]) / Scalar(2);
    if (2 * i < n - 1) {
      rule.nodes[i] = sym;
      rule.nodes[n - 1 - i] = -sym;
    } else if (2 * i == n - 1) {
      rule.nodes[i] = Scalar(0);
    }
  }
  for (int i = 0; i < n; ++i) {
    const Scalar p = detail::legendre(m, rule.nodes[i]);
    rule.weights[i] = Scalar(2) / (Scalar(n) * Scalar(m) * p * p);
  }
  return rule;
}

template <typename Scalar>
LagrangeBasis<Scalar> lagrange_basis(const QuadratureRule<Scalar>& rule) {
  LagrangeBasis<Scalar> basis;
  basis.rule = rule;
  const int n = rule.n;
  basis.barycentric_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Scalar w = Scalar(1);
    for (int j = 0; j < n; ++j)
      if (j != i) w *= rule.nodes[i] - rule.nodes[j];
    basis.barycentric_weights[i] = Scalar(1) / w;
  }
  // Rescale so the largest weight is 1; barycentric formulas are
  // invariant under common scaling.
  basis.barycentric_weights /=
      basis.barycentric_weights.cwiseAbs().maxCoeff();
  return basis;
}

// D(j,i) = dpsi_i/dtau at node j; row index = evaluation node.
// Diagonal by the negative-sum trick so that D*1 = 0 exactly.
template <typename Scalar>
Mat<Scalar> diff_matrix(const LagrangeBasis<Scalar>& basis) {
  const int n = basis.rule.n;
  const auto& x = basis.rule.nodes;
  const auto& w = basis.barycentric_weights;
  Mat<Scalar> D = Mat<Scalar>::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Scalar diag = Scalar(0);
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      D(j, i) = (w[i] / w[j]) / (x[j] - x[i]);
      diag -= D(j, i);
    }
    D(j, j) = diag;
  }
  return D;
}

// Barycentric evaluation of sum_j coeffs[j] psi_j(tau).
template <typename Scalar, typename Derived>
Scalar eval_interpolant(const LagrangeBasis<Scalar>& basis,
                        const Eigen::MatrixBase<Derived>& coeffs,
                        Scalar tau) {
  if (!(tau >= Scalar(-1) && tau <= Scalar(1)))
    throw std::invalid_argument("eval_interpolant: tau outside [-1,1]");
  const int n = basis.rule.n;
  const auto& x = basis.rule.nodes;
  const auto& w = basis.barycentric_weights;
  for (int j = 0; j < n; ++j)
    if (tau == x[j]) return coeffs[j];
  Scalar num = Scalar(0), den = Scalar(0);
  for (int j = 0; j < n; ++j) {
    const Scalar t = w[j] / (tau - x[j]);
    num += t * coeffs[j];
    den += t;
  }
  return num / den;
}

}  // namespace stdgsem
