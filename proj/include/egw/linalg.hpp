#pragma once

#include "egw/core.hpp"

#include <cmath>
#include <optional>

#include <boost/math/special_functions/gamma.hpp>

namespace egw {

/// log|A| for a symmetric positive-definite A, or nullopt when the Cholesky
/// factorization fails.
template <typename Derived>
std::optional<typename Derived::Scalar> try_log_det_spd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::LLT<MatrixX<Scalar>> llt(a.derived());
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= Scalar(0)).any()) return std::nullopt;
  return Scalar(2) * diag.array().log().sum();
}

template <typename Derived>
typename Derived::Scalar log_det_spd(const Eigen::MatrixBase<Derived>& a) {
  auto value = try_log_det_spd(a);
  if (!value) throw Error(Errc::not_pd, "matrix is not positive definite");
  return *value;
}

template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& a) {
  return try_log_det_spd(a).has_value();
}

template <typename Derived>
MatrixX<typename Derived::Scalar> spd_inverse(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::LLT<MatrixX<Scalar>> llt(a.derived());
  if (llt.info() != Eigen::Success) throw Error(Errc::not_pd, "matrix is not positive definite");
  MatrixX<Scalar> inv = llt.solve(MatrixX<Scalar>::Identity(a.rows(), a.cols()));
  return Scalar(0.5) * (inv + inv.transpose());
}

/// tr(A B) without forming the product.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_of_product(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

/// log Γ_r(a) = r(r-1)/4 log π + Σ_{i<r} log Γ(a - i/2).
template <typename Scalar>
Scalar log_multivariate_gamma(Scalar a, int r) {
  using std::log;
  Scalar out = Scalar(r) * Scalar(r - 1) / Scalar(4) * log(boost::math::constants::pi<Scalar>());
  for (int i = 0; i < r; ++i) out += boost::math::lgamma(a - Scalar(i) / Scalar(2));
  return out;
}

}  // namespace egw
