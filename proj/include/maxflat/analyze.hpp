#pragma once

#include <span>
#include <string>
#include <vector>

#include "maxflat/design.hpp"
#include "maxflat/types.hpp"

namespace maxflat {

/// `n` uniform points on [0, pi].
[[nodiscard]] std::vector<double> uniform_grid(std::size_t n = 2048);

/// b and a multiply powers of z^-1 (difference-equation convention).
[[nodiscard]] std::vector<Complex> frequency_response(std::span<const double> b, std::span<const double> a,
                                                      std::span<const double> omegas);
[[nodiscard]] Complex frequency_response(std::span<const double> b, std::span<const double> a, double omega);

/// e^{-i q w} (i w / Ts)^k_t
[[nodiscard]] std::vector<Complex> ideal_response(int k_t, double q, double Ts, std::span<const double> omegas);

[[nodiscard]] std::vector<double> complex_error(std::span<const Complex> h, std::span<const Complex> ideal);

/// Phase with +-2 pi jumps removed.
[[nodiscard]] std::vector<double> unwrapped_phase(std::span<const Complex> h);

/// -d(phase)/d(omega) by central differences (one-sided at the ends).
[[nodiscard]] std::vector<double> measured_group_delay(std::span<const double> b, std::span<const double> a,
                                                       std::span<const double> omegas);

struct ConstraintCheck {
  double omega = 0.0;
  int k_omega = 0;
  int k_t = 0;
  Complex target;
  Complex analytic;
  /// Finite-difference estimate; only for k_omega <= 3.
  bool has_fd = false;
  Complex finite_difference;
  double analytic_error = 0.0;
  double fd_error = 0.0;
  bool pass = true;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  double residual = 0.0;
  double residual_bound = 0.0;
  [[nodiscard]] bool pass() const;
  [[nodiscard]] std::vector<std::string> violations() const;
};

/// Compares every derivative constraint with its target, analytically and by
/// an independent finite-difference probe of the basis-sum response.
[[nodiscard]] ConstraintReport verify_constraints(const FilterbankDesign& design);

struct OrbitError {
  double eps_r = 0.0;
  double eps_theta = 0.0;
};

/// Wraps an angle into (-pi, pi].
[[nodiscard]] double wrap_angle(double a);

/// Steady-state orbit error predicted from the smoother response.
[[nodiscard]] OrbitError orbit_steady_state(std::span<const double> b0, std::span<const double> a, double f_orb,
                                            double r_orb, double q);

/// Impulse-response energy, truncated once |h| falls below `tail` for a full
/// order's worth of samples (or at max_samples).
[[nodiscard]] double impulse_energy(std::span<const double> b, std::span<const double> a, double tail = kInfSumTol,
                                    std::size_t max_samples = 1000000);

/// (1/2pi) integral of |H|^2 over the full circle by trapezoid on `points` intervals.
[[nodiscard]] double parseval_energy(std::span<const double> b, std::span<const double> a,
                                     std::size_t points = 8192);

}  // namespace maxflat
