// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cvgauss {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMat = Mat<Complex<Scalar>>;

template <typename Scalar>
using CVec = Vec<Complex<Scalar>>;

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad descriptions, gates, mode indices or documents.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical breakdown: singular systems, underflow, non-convergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File or stream failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvgauss
