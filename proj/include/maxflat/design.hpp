#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxflat/butter.hpp"
#include "maxflat/poly.hpp"
#include "maxflat/types.hpp"

namespace maxflat {

/// User-facing parameters of a MaxFlat filterbank.
///
/// Frequencies are normalized (cycles per sample). The filter order is the
/// total number of derivative constraints, K = K_w_dc + 2 K_w_nb + K_w_pi.
/// For non-causal designs the constraints are spread over all 2*(K/2)
/// Butterworth poles, so K must be even.
struct DesignSpec {
  double fs_hz = 1000.0;
  double f_wb = 0.05;
  std::optional<double> f_nb;
  int k_w_dc = 1;
  int k_w_nb = 0;
  int k_w_pi = 0;
  /// Number of outputs; output k_t estimates the k_t-th time derivative.
  int k_t = 1;
  /// Passband group delay in samples; empty selects the white-noise-gain optimum.
  std::optional<double> group_delay;
  bool causal = true;
  /// Optimize the delay separately for every output instead of applying the
  /// smoother's optimum to the whole bank.
  bool per_output_delay = false;
  /// Multiplier on the Butterworth cut-off.
  double bandwidth_factor = 1.0;
  PoleMapping pole_mapping = PoleMapping::ImpulseInvariance;

  [[nodiscard]] int order() const { return k_w_dc + 2 * k_w_nb + k_w_pi; }
  [[nodiscard]] double Ts() const { return 1.0 / fs_hz; }
  [[nodiscard]] double omega_wb() const { return kTwoPi * f_wb; }
  [[nodiscard]] double omega_nb() const { return kTwoPi * f_nb.value_or(0.0); }
  /// Butterworth cut-off in rad/sec.
  [[nodiscard]] double cutoff_rad_per_sec() const { return kTwoPi * f_wb * fs_hz * bandwidth_factor; }

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
};

/// One row block of the constraint system: `count` derivative orders at `omega`.
struct ConstraintBlock {
  double omega = 0.0;
  int count = 0;
};

struct ConstraintSystem {
  CMatrix psi;  ///< K x K: basis-function derivatives, one column per pole
  CMatrix D;    ///< K x K_t: targets, one column per output
  std::vector<ConstraintBlock> blocks;  ///< dc, -nb, +nb, pi
  double condition = 1.0;
  std::vector<std::string> warnings;
};

/// A causal filterbank (or one realizable half of a non-causal one).
struct FilterbankDesign {
  DesignSpec spec;
  PoleSet poles;
  CMatrix C;                  ///< K x K_t partial-fraction coefficients
  double q = 0.0;             ///< group delay of the smoother output
  std::vector<double> delays; ///< group delay used for every output
  RMatrix sigma;              ///< K_t x K_t white-noise cross-gain
  std::vector<double> a;      ///< shared denominator, a[0] = 1
  std::vector<std::vector<double>> b;  ///< one numerator per output, b[K] = 0
  double Ts = 1.0;
  double condition = 1.0;
  double residual = 0.0;      ///< ||Psi C - D||_inf
  std::vector<std::string> warnings;

  [[nodiscard]] int order() const { return static_cast<int>(poles.size()); }
  [[nodiscard]] int outputs() const { return static_cast<int>(C.cols()); }
};

/// Non-causal design split into two realizable recursions.
///
/// `forward` holds the terms with |p| < 1 and runs forward in time.
/// `backward` holds the terms with |p| > 1 re-expressed with poles 1/p and
/// coefficients -c*(1/p); it runs on time-reversed data and its output is
/// delayed by one (reversed-time) sample before being reversed back.
struct NoncausalDesign {
  DesignSpec spec;
  PoleSet poles;  ///< all 2K poles, inside ones first
  CMatrix C;      ///< 2K x K_t
  RMatrix sigma;  ///< two-sided white-noise cross-gain
  double condition = 1.0;
  double residual = 0.0;
  FilterbankDesign forward;
  FilterbankDesign backward;
};

/// alpha(k, l) for 0 <= k, l < K.
[[nodiscard]] Eigen::MatrixXd alpha_table(int K);

/// Derivatives 0..K-1 (w.r.t. omega) of psi(omega) = e^{i omega}/(e^{i omega} - p)
/// at omega_d.
[[nodiscard]] CVector basis_derivative_column(Complex p, double omega_d, int K);

/// Derivative targets at dc for output order k_t and delay q.
[[nodiscard]] CVector dc_targets(double q, double Ts, int k_w_dc, int k_t);

[[nodiscard]] ConstraintSystem assemble_system(const DesignSpec& spec, const PoleSet& poles,
                                               std::span<const double> delays);

/// Sum over m >= 0 of conj(p_a)^m p_b^m in closed form. Causal poles only.
[[nodiscard]] CMatrix gram_matrix(const PoleSet& poles);

/// Gram matrix of the two-sided basis: poles inside the unit circle give
/// causal sequences p^m (m >= 0), poles outside give anti-causal -p^m (m < 0).
[[nodiscard]] CMatrix two_sided_gram_matrix(const PoleSet& poles);

[[nodiscard]] CMatrix solve_coefficients(const ConstraintSystem& system);

[[nodiscard]] RMatrix white_noise_gain(const CMatrix& C, const CMatrix& S);

/// White-noise gain of output k_t as a polynomial in the delay q, and its
/// derivative.
struct WngPolynomial {
  Polynomial sigma;
  Polynomial derivative;
};
[[nodiscard]] WngPolynomial wng_polynomial(const DesignSpec& spec, const PoleSet& poles,
                                           const CMatrix& S, int k_t);

struct OptimalDelay {
  double q = 0.0;
  double wng = 0.0;
  /// The gain does not depend on q; q is reported as 0.
  bool delay_independent = false;
};
[[nodiscard]] OptimalDelay optimal_group_delay(const DesignSpec& spec, const PoleSet& poles,
                                               const CMatrix& S, int k_t);

struct RealTransfer {
  std::vector<double> b;
  std::vector<double> a;
};
/// Expand sum_k c_k z/(z - p_k) over a common denominator.
[[nodiscard]] RealTransfer transfer_coefficients(const CVector& c, const PoleSet& poles);

/// sum_k c_k e^{i w}/(e^{i w} - p_k); valid for poles on either side of the circle.
[[nodiscard]] Complex basis_sum_response(const PoleSet& poles, const CVector& c, double omega);

[[nodiscard]] FilterbankDesign design_filterbank(const DesignSpec& spec);
[[nodiscard]] NoncausalDesign noncausal_design(const DesignSpec& spec);

}  // namespace maxflat
