#pragma once

#include <span>
#include <vector>

#include "maxflat/design.hpp"
#include "maxflat/types.hpp"

namespace maxflat {

enum class RealizationForm { DCF, CCF, DSF };

/// w[n] = G w[n-1] + H x[n], y[n] = C w[n].
///
/// DCF and DSF matrices are complex in general; CCF is real but stored in
/// the same complex containers so one stepping routine serves all forms.
struct StateSpaceRealization {
  RealizationForm form = RealizationForm::DCF;
  CMatrix G;
  CVector H;
  CMatrix C;

  [[nodiscard]] int order() const { return static_cast<int>(G.rows()); }
  [[nodiscard]] int outputs() const { return static_cast<int>(C.rows()); }
};

struct FilterState {
  CVector w;
  long n = 0;
};

[[nodiscard]] StateSpaceRealization to_dcf(const FilterbankDesign& design);
[[nodiscard]] StateSpaceRealization to_ccf(const FilterbankDesign& design);
/// Throws NumericalError if the augmented output matrix is singular.
[[nodiscard]] StateSpaceRealization to_dsf(const FilterbankDesign& design);

[[nodiscard]] FilterState zero_state(const StateSpaceRealization& r);

/// Advances `state` by one sample and returns the real outputs.
/// Throws NumericalError when an output carries a non-negligible imaginary part.
std::vector<double> lss_step(const StateSpaceRealization& r, FilterState& state, double x);

/// Runs a whole sequence from `state`; out[k_t][n].
[[nodiscard]] std::vector<std::vector<double>> run_realization(const StateSpaceRealization& r,
                                                               FilterState& state,
                                                               std::span<const double> x);

/// Real-valued CCF stepping for the simulators.
class RealFilterbank {
 public:
  explicit RealFilterbank(const FilterbankDesign& design);

  [[nodiscard]] int order() const { return static_cast<int>(a_.size()) - 1; }
  [[nodiscard]] int outputs() const { return static_cast<int>(b_.size()); }
  void reset();
  /// Steady state for a held input x0.
  void warm_start(double x0);
  /// Writes one value per output into `y`.
  void step(double x, std::span<double> y);
  [[nodiscard]] std::vector<std::vector<double>> run(std::span<const double> x);

 private:
  std::vector<double> a_;
  std::vector<std::vector<double>> b_;
  std::vector<double> w_;
  std::vector<double> scratch_;
};

/// Direct-form difference equation with zero history. b may have any length.
[[nodiscard]] std::vector<double> run_filter(std::span<const double> b, std::span<const double> a,
                                             std::span<const double> x);

/// w = (I - G)^{-1} H x0; the DSF form uses [x0, 0, ...] instead.
/// Throws NumericalError when I - G is singular.
[[nodiscard]] FilterState initialize_state(const StateSpaceRealization& r, double x0);

/// Zero-phase-style batch run of a split non-causal design: forward part on
/// x, backward part on reversed x, one-sample shift, reversed back, summed.
[[nodiscard]] std::vector<std::vector<double>> run_noncausal(const NoncausalDesign& design,
                                                             std::span<const double> x);

}  // namespace maxflat
