#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

#include "stdgsem/quadrature.hpp"

namespace stdgsem {

// Temporal operators on the reference element [-1,1].
// Satisfy the summation-by-parts identity M D + (M D)^T = B.
template <typename Scalar = double>
struct SbpOperators {
  int n = 0;
  Mat<Scalar> B;  // diag(-1, 0, ..., 0, 1)
  Mat<Scalar> M;  // diag(LGL weights), symmetric positive definite
  Mat<Scalar> D;  // nodal differentiation matrix
};

template <typename Scalar = double>
struct ButcherTableau {
  int s = 0;
  Mat<Scalar> A;
  Vec<Scalar> b;
  Vec<Scalar> c;
};

template <typename Scalar = double>
SbpOperators<Scalar> sbp_operators(int n) {
  if (n < 2) throw std::invalid_argument("sbp_operators: need n >= 2");
  const auto rule = lgl_rule<Scalar>(n);
  SbpOperators<Scalar> ops;
  ops.n = n;
  ops.B = Mat<Scalar>::Zero(n, n);
  ops.B(0, 0) = Scalar(-1);
  ops.B(n - 1, n - 1) = Scalar(1);
  ops.M = rule.weights.asDiagonal();
  ops.D = diff_matrix(lagrange_basis(rule));
  return ops;
}

template <typename Scalar>
Scalar sbp_defect(const SbpOperators<Scalar>& ops) {
  const Mat<Scalar> MD = ops.M * ops.D;
  return (MD + MD.transpose() - ops.B).cwiseAbs().maxCoeff();
}

// A = (D + M^{-1} e1 e1^T)^{-1} / 2, b = M 1 / 2, c = (1 + tau) / 2.
// The result coincides with the Lobatto IIIC tableau of the same size.
template <typename Scalar>
ButcherTableau<Scalar> to_butcher(const SbpOperators<Scalar>& ops) {
  const int n = ops.n;
  Mat<Scalar> K = ops.D;
  K(0, 0) += Scalar(1) / ops.M(0, 0);
  const Mat<Scalar> Kinv =
      Eigen::PartialPivLU<Mat<Scalar>>(K).solve(Mat<Scalar>::Identity(n, n));
  const Scalar defect =
      (K * Kinv - Mat<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(defect <= Scalar(1e-10)))
    throw std::runtime_error("to_butcher: singular operator, inversion defect " +
                             std::to_string(double(defect)));
  ButcherTableau<Scalar> tab;
  tab.s = n;
  tab.A = Kinv / Scalar(2);
  tab.b = ops.M.diagonal() / Scalar(2);
  tab.c = (lgl_rule<Scalar>(n).nodes.array() + Scalar(1)) / Scalar(2);
  return tab;
}

// Hard-coded Lobatto IIIC coefficients; independent oracle for to_butcher.
template <typename Scalar = double>
ButcherTableau<Scalar> lobatto_tableau(int s) {
  ButcherTableau<Scalar> tab;
  tab.s = s;
  tab.A.resize(s, s);
  tab.b.resize(s);
  tab.c.resize(s);
  const Scalar r5 = std::sqrt(Scalar(5));
  switch (s) {
    case 2:
      tab.A << Scalar(0.5), Scalar(-0.5),
               Scalar(0.5), Scalar(0.5);
      tab.b << Scalar(0.5), Scalar(0.5);
      tab.c << Scalar(0), Scalar(1);
      break;
    case 3:
      tab.A << Scalar(1) / 6, Scalar(-1) / 3, Scalar(1) / 6,
               Scalar(1) / 6, Scalar(5) / 12, Scalar(-1) / 12,
               Scalar(1) / 6, Scalar(2) / 3, Scalar(1) / 6;
      tab.b << Scalar(1) / 6, Scalar(2) / 3, Scalar(1) / 6;
      tab.c << Scalar(0), Scalar(0.5), Scalar(1);
      break;
    case 4:
      tab.A << Scalar(1) / 12, -r5 / 12, r5 / 12, Scalar(-1) / 12,
               Scalar(1) / 12, Scalar(0.25), (Scalar(10) - 7 * r5) / 60, r5 / 60,
               Scalar(1) / 12, (Scalar(10) + 7 * r5) / 60, Scalar(0.25), -r5 / 60,
               Scalar(1) / 12, Scalar(5) / 12, Scalar(5) / 12, Scalar(1) / 12;
      tab.b << Scalar(1) / 12, Scalar(5) / 12, Scalar(5) / 12, Scalar(1) / 12;
      tab.c << Scalar(0), Scalar(0.5) - r5 / 10, Scalar(0.5) + r5 / 10,
               Scalar(1);
      break;
    default:
      throw std::invalid_argument(
          "lobatto_tableau: closed forms stored for s in {2,3,4}; construct "
          "larger tableaus via to_butcher(sbp_operators(s))");
  }
  return tab;
}

template <typename Scalar = double>
struct OrderConditionDefects {
  Vec<Scalar> B;  // simplifying condition B(j): b^T c^{j-1} = 1/j
  Vec<Scalar> C;  // C(j): A c^{j-1} = c^j / j
  Vec<Scalar> D;  // D(j): A^T diag(b) c^{j-1} = diag(b)(1 - c^j) / j
};

template <typename Scalar>
OrderConditionDefects<Scalar> order_condition_defects(
    const ButcherTableau<Scalar>& tab, int j_max) {
  if (j_max < 1) throw std::invalid_argument("order_condition_defects: j_max >= 1");
  OrderConditionDefects<Scalar> def;
  def.B.resize(j_max);
  def.C.resize(j_max);
  def.D.resize(j_max);
  const int s = tab.s;
  Vec<Scalar> cjm1 = Vec<Scalar>::Ones(s);  // c^0 = 1, including c_i = 0
  for (int j = 1; j <= j_max; ++j) {
    const Vec<Scalar> cj = cjm1.cwiseProduct(tab.c);
    def.B[j - 1] = std::abs(tab.b.dot(cjm1) - Scalar(1) / j);
    def.C[j - 1] = (tab.A * cjm1 - cj / j).cwiseAbs().maxCoeff();
    def.D[j - 1] = (tab.A.transpose() * tab.b.cwiseProduct(cjm1) -
                    tab.b.cwiseProduct(Vec<Scalar>::Ones(s) - cj) / j)
                       .cwiseAbs()
                       .maxCoeff();
    cjm1 = cj;
  }
  return def;
}

// True iff ker(D) = span(1): exactly one singular value below
// 1e-12 * sigma_max and D 1 = 0 at that scale.
template <typename Scalar>
bool null_space_consistent(const Mat<Scalar>& D) {
  if (D.rows() != D.cols()) return false;
  const Eigen::JacobiSVD<Mat<Scalar>> svd(D);
  const Vec<Scalar> sigma = svd.singularValues();
  const Scalar smax = sigma[0];
  if (!(smax > Scalar(0))) return false;
  int below = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma[i] < Scalar(1e-12) * smax) ++below;
  const Scalar d1 =
      (D * Vec<Scalar>::Ones(D.cols())).cwiseAbs().maxCoeff();
  return below == 1 && d1 <= Scalar(1e-10) * smax;
}

}  // namespace stdgsem
