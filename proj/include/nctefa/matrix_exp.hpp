#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "nctefa/error.hpp"

namespace nctefa {

namespace detail {

// Backward-error bounds for the [m/m] Pade approximants (1-norm, double precision).
inline constexpr std::array<double, 4> kPadeTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                                  9.504178996162932e-1, 2.097847961257068e0};
inline constexpr std::array<int, 4> kPadeDegree{3, 5, 7, 9};
inline constexpr double kPadeTheta13 = 5.371920351148152e0;

inline double norm1(const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

/// Odd/even split U, V of the degree-m Pade numerator for m in {3,5,7,9}.
inline void pade_low(const Eigen::MatrixXd& a, int m, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static constexpr double b3[] = {120., 60., 12., 1.};
  static constexpr double b5[] = {30240., 15120., 3360., 420., 30., 1.};
  static constexpr double b7[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static constexpr double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                  2162160.,     110880.,     3960.,       90.,         1.};
  const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
  const auto n = a.rows();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  Eigen::MatrixXd power = ident;  // A^(2j)
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(n, n);
  v = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; 2 * j <= m; ++j) {
    v += b[2 * j] * power;
    odd += b[2 * j + 1] * power;
    if (2 * j + 2 <= m) power = power * a2;
  }
  u = a * odd;
}

inline void pade13(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static constexpr double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                 1187353796428800.,  129060195264000.,   10559470521600.,
                                 670442572800.,      33522128640.,       1323241920.,
                                 40840800.,          960960.,            16380.,
                                 182.,               1.};
  const auto n = a.rows();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  Eigen::MatrixXd tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * tmp + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a diagonal Pade approximant
/// (degree 3, 5, 7, 9 or 13 chosen from the 1-norm).
inline Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ContractError("matrix_exp: matrix is not square");
  if (a.size() == 0) return a;
  if (!a.allFinite()) throw NumericError("matrix_exp: non-finite input");

  const double norm = detail::norm1(a);
  Eigen::MatrixXd u, v;
  int squarings = 0;
  bool done = false;
  for (std::size_t i = 0; i < detail::kPadeTheta.size(); ++i) {
    if (norm <= detail::kPadeTheta[i]) {
      detail::pade_low(a, detail::kPadeDegree[i], u, v);
      done = true;
      break;
    }
  }
  if (!done) {
    if (norm > detail::kPadeTheta13) {
      squarings = static_cast<int>(std::ceil(std::log2(norm / detail::kPadeTheta13)));
    }
    detail::pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  // r = (V - U)^{-1} (V + U)
  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace nctefa
