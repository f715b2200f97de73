#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dqc1lab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Eigenvalues below this are treated as exactly zero in entropy and
// support decisions (double-precision eigensolvers emit O(1e-14) noise
// on rank-deficient states).
inline constexpr double kEigenvalueFloor = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpace : Error {
  using Error::Error;
};
struct InvalidState : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NotSkew : Error {
  using Error::Error;
};
struct InvalidMap : Error {
  using Error::Error;
};
struct ZeroProbabilityBranch : Error {
  using Error::Error;
};
struct IntegratorUnstable : Error {
  using Error::Error;
};
struct TruncationError : Error {
  using Error::Error;
};
struct NotInformationallyComplete : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};

}  // namespace dqc1lab
