#pragma once

#include <vector>

#include "maxflat/types.hpp"

namespace maxflat {

/// How s-plane poles are carried into the z-plane.
enum class PoleMapping {
  /// z = exp(T_s s). Default for all MaxFlat designs.
  ImpulseInvariance,
  /// z = (1 + s T_s/2) / (1 - s T_s/2), no frequency pre-warping.
  /// Only used to reproduce the plain Butterworth reference filters.
  Bilinear,
};

/// z-plane basis poles. Conjugate-closed; `inside(k)` tells on which side of
/// the unit circle pole k lies.
struct PoleSet {
  std::vector<Complex> poles;

  [[nodiscard]] std::size_t size() const { return poles.size(); }
  [[nodiscard]] bool inside(std::size_t k) const { return std::abs(poles[k]) < 1.0; }
  [[nodiscard]] bool all_inside() const;
  [[nodiscard]] std::size_t count_inside() const;
};

/// The 2K roots of 1 + (-s^2/omega_c^2)^K = 0, ordered by angle on the
/// circle |s| = omega_c starting just above the positive real axis.
[[nodiscard]] std::vector<Complex> butterworth_s_poles(int K, double omega_c);

[[nodiscard]] Complex map_pole(Complex s, double Ts, PoleMapping mapping);

/// The K left-half-plane Butterworth poles mapped into the unit disc.
/// Throws ValidationError if omega_c * Ts >= pi.
[[nodiscard]] PoleSet causal_z_poles(int K, double omega_c, double Ts,
                                     PoleMapping mapping = PoleMapping::ImpulseInvariance);

/// All 2K poles; the K right-half-plane ones land outside the unit circle as
/// reciprocal conjugates of the inside set. Inside poles come first.
[[nodiscard]] PoleSet full_z_poles(int K, double omega_c, double Ts,
                                   PoleMapping mapping = PoleMapping::ImpulseInvariance);

/// Transfer coefficients of a plain causal K-th order Butterworth low-pass
/// discretized with the bilinear map: K zeros at z = -1, unit dc gain.
struct TransferFunction {
  std::vector<double> b;
  std::vector<double> a;
};
[[nodiscard]] TransferFunction bilinear_butterworth_lowpass(int K, double omega_c, double Ts);

}  // namespace maxflat
