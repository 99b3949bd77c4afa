#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace egw {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

enum class Errc {
  invalid_argument,
  invalid_pair,
  not_pd,
  not_decomposable,
  support_violation,
  dimension_mismatch,
  empty_chain,
  degenerate_draw,
  seed_required,
  io,
  parse,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace egw
