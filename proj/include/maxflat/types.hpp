#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace maxflat {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Largest tolerated imaginary residue when a value is expected to be real.
inline constexpr double kComplexTol = 1.0e-3;
/// Two white-noise gains closer than this are treated as tied.
inline constexpr double kWngTieTol = 1.0e-6;
/// Tail magnitude at which an infinite impulse-response sum is truncated.
inline constexpr double kInfSumTol = 1.0e-12;

}  // namespace maxflat
