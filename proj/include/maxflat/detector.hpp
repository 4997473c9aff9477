#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxflat/design.hpp"
#include "maxflat/types.hpp"

namespace maxflat {

/// h0, h1, h2 applied as y[n] = sum_m h[m] x[n-m].
[[nodiscard]] std::array<std::array<double, 3>, 3> three_point_kernels(double Ts);

/// causal:     E[n] = (x[n-1]^2 - x[n-2] x[n]) / Ts^2
/// non-causal: E[n] = (x[n]^2 - x[n-1] x[n+1]) / Ts^2
/// Samples without the required neighbours are 0.
[[nodiscard]] std::vector<double> tk_energy_threepoint(std::span<const double> x, bool causal, double Ts);

/// E[n] = y1[n]^2 - y0[n] y2[n]
[[nodiscard]] std::vector<double> tk_energy_derivatives(std::span<const double> y0, std::span<const double> y1,
                                                        std::span<const double> y2);

enum class DetectorTag { FIR_NUL_NC, IIR_BW0, IIR_BW1, IIR_BW0_NC, IIR_BW1_NC };

[[nodiscard]] std::string tag_name(DetectorTag tag);
/// Throws ValidationError listing the supported tags.
[[nodiscard]] DetectorTag parse_tag(const std::string& name);
[[nodiscard]] std::vector<DetectorTag> all_tags();

struct DetectorConfig {
  DetectorTag tag = DetectorTag::IIR_BW1;
  double fs_hz = 1000.0;
  double f_wb = 0.05;
  double f_nb = 0.07;
};

/// Characteristics of the k_t = 0 path (smoother and h0 combined).
struct DetectorSummary {
  std::string name;
  double q = 0.0;
  double sigma0 = 0.0;
  double h_wb = 0.0;
  double h_nb = 0.0;
};

class Detector {
 public:
  explicit Detector(const DetectorConfig& config);

  [[nodiscard]] const DetectorConfig& config() const { return config_; }
  [[nodiscard]] bool two_stage() const;
  /// TK energy for a whole batch.
  [[nodiscard]] std::vector<double> energy(std::span<const double> x) const;
  [[nodiscard]] DetectorSummary summary() const;

 private:
  [[nodiscard]] std::vector<double> smooth(std::span<const double> x) const;

  DetectorConfig config_;
  double Ts_ = 1.0;
  std::optional<FilterbankDesign> causal_;
  std::optional<NoncausalDesign> noncausal_;
  std::vector<double> bw0_b_, bw0_a_;
};

[[nodiscard]] Detector build_detector(const DetectorConfig& config);

struct RocPoint {
  double threshold = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  ///< from (0,0) to (1,1)
  double auc = 0.0;
};

/// Exact empirical ROC over the pooled statistics; trapezoidal AUC.
[[nodiscard]] RocCurve roc_from_statistics(std::span<const double> true_stats, std::span<const double> false_stats);

struct DetectionScenario {
  std::size_t N = 1000;
  bool deterministic_signal = true;
  bool known_signal_freq = false;
  double p_sig = 1.0;
  double p_int = 0.1;
  long sig_n0 = 400;
  long sig_n1 = 400;
  long true_lo = 400, true_hi = 500;
  long false_lo = 200, false_hi = 800;

  /// The n0 = 400, n1 = 450, P_sig = P_int = 1 variant.
  static DetectionScenario non_deterministic();
};

struct DetectionResult {
  RocCurve roc;
  std::vector<double> true_stats;
  std::vector<double> false_stats;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Trials are independent; `threads` > 1 splits them across workers with
/// identical results.
[[nodiscard]] DetectionResult run_detection_mc(const Detector& detector, std::size_t trials, std::uint64_t seed,
                                               const DetectionScenario& scenario = {}, unsigned threads = 1);

}  // namespace maxflat
