#include "maxflat/butter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxflat/error.hpp"
#include "maxflat/poly.hpp"

namespace maxflat {

bool PoleSet::all_inside() const {
  return std::all_of(poles.begin(), poles.end(), [](Complex p) { return std::abs(p) < 1.0; });
}

std::size_t PoleSet::count_inside() const {
  return static_cast<std::size_t>(
      std::count_if(poles.begin(), poles.end(), [](Complex p) { return std::abs(p) < 1.0; }));
}

std::vector<Complex> butterworth_s_poles(int K, double omega_c) {
  if (K < 1) throw ValidationError("Butterworth order K must be >= 1");
  if (!(omega_c > 0.0)) throw ValidationError("cut-off frequency must be positive");
  // (-s^2/w^2)^K = -1  =>  s = w * exp(i*pi*(2m + 1 + K)/(2K)) ... written directly
  // as the 2K points at angles pi*(2m+1)/(2K) + pi/2 on the circle.
  std::vector<Complex> s;
  s.reserve(static_cast<std::size_t>(2 * K));
  for (int m = 0; m < 2 * K; ++m) {
    const double theta = kPi * (2.0 * m + 1.0) / (2.0 * K) + kPi / 2.0;
    s.push_back(std::polar(omega_c, theta));
  }
  // Exact-symmetry clean-up: snap numerically tiny parts to zero so that real
  // poles stay real and conjugate pairs are exact conjugates.
  for (auto& v : s) {
    if (std::abs(v.imag()) < 1e-14 * omega_c) v = Complex{v.real(), 0.0};
    if (std::abs(v.real()) < 1e-14 * omega_c) v = Complex{0.0, v.imag()};
  }
  return s;
}

Complex map_pole(Complex s, double Ts, PoleMapping mapping) {
  switch (mapping) {
    case PoleMapping::ImpulseInvariance:
      return std::exp(s * Ts);
    case PoleMapping::Bilinear:
      return (1.0 + s * Ts / 2.0) / (1.0 - s * Ts / 2.0);
  }
  return std::exp(s * Ts);
}

namespace {

void check_nyquist(double omega_c, double Ts) {
  if (!(Ts > 0.0)) throw ValidationError("sampling period must be positive");
  if (omega_c * Ts >= kPi) {
    throw ValidationError("bandwidth exceeds Nyquist: Omega_c*T_s = " + std::to_string(omega_c * Ts) +
                          " >= pi");
  }
}

// Left-half-plane poles in conjugate order: p, conj(p), ..., real pole last.
std::vector<Complex> lhp_poles(int K, double omega_c) {
  std::vector<Complex> out;
  for (auto s : butterworth_s_poles(K, omega_c)) {
    if (s.real() < 0.0 && s.imag() >= 0.0) {
      out.push_back(s);
      if (s.imag() > 0.0) out.push_back(std::conj(s));
    }
  }
  return out;
}

}  // namespace

PoleSet causal_z_poles(int K, double omega_c, double Ts, PoleMapping mapping) {
  check_nyquist(omega_c, Ts);
  PoleSet set;
  for (auto s : lhp_poles(K, omega_c)) set.poles.push_back(map_pole(s, Ts, mapping));
  return set;
}

PoleSet full_z_poles(int K, double omega_c, double Ts, PoleMapping mapping) {
  check_nyquist(omega_c, Ts);
  PoleSet set;
  const auto lhp = lhp_poles(K, omega_c);
  for (auto s : lhp) set.poles.push_back(map_pole(s, Ts, mapping));
  for (auto s : lhp) set.poles.push_back(map_pole(-std::conj(s), Ts, mapping));
  return set;
}

TransferFunction bilinear_butterworth_lowpass(int K, double omega_c, double Ts) {
  const PoleSet ps = causal_z_poles(K, omega_c, Ts, PoleMapping::Bilinear);
  const std::vector<Complex> zeros(static_cast<std::size_t>(K), Complex{-1.0});
  const auto a = poly_from_roots(ps.poles).real_coeffs();
  auto b = poly_from_roots(zeros).real_coeffs();
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  for (double& v : b) v *= sa / sb;
  return {std::move(b), a};
}

}  // namespace maxflat
