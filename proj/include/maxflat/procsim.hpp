#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maxflat/types.hpp"

namespace maxflat {

/// Second-order damped oscillator with poles at sigma +- i Omega.
struct ProcessParams {
  double tau_c = 1.0;     ///< coherence duration, sec
  double lambda_c = 1.0;  ///< wave period, sec

  [[nodiscard]] double sigma() const { return -1.0 / tau_c; }
  [[nodiscard]] double omega() const { return kTwoPi / lambda_c; }
  /// Gain giving unit impulse-response energy.
  [[nodiscard]] double b0() const;
  /// Throws ValidationError unless tau_c, lambda_c > 0.
  void validate() const;
};

struct DiscreteProcess {
  Eigen::Matrix2d G;
  Eigen::Vector2d H;
  Eigen::RowVector2d C;
  double Ts = 1.0;
};

/// Sampled held-input model. Throws ValidationError for a degenerate
/// oscillator (infinite wave period) or T_s <= 0.
[[nodiscard]] DiscreteProcess discretize_process(const ProcessParams& params, double Ts);

/// Quadrature of the continuous impulse-response energy up to 20 tau_c.
[[nodiscard]] double verify_normalization(const ProcessParams& params, double b0_scale = 1.0);

enum class InputKind { Deterministic, Stochastic };

struct InputSpec {
  InputKind kind = InputKind::Deterministic;
  long n0 = 0;
  long n1 = 0;
  double power = 1.0;
  std::uint64_t seed = 0;
};

/// Drives the process with held rectangular pulses over [n0, n1] from zero state.
[[nodiscard]] std::vector<double> generate_waveform(const DiscreteProcess& process, const InputSpec& input,
                                                    std::size_t N);

enum class Study { Detect, Track };
enum class Role { Signal, Interference };
enum class TrackScenario { LoG, HiG };

/// Normalized centre frequencies shared by both studies.
inline constexpr double kSignalFreq = 0.05;
inline constexpr double kInterferenceFreq = 0.07;
inline constexpr double kDetectFs = 1000.0;
inline constexpr double kTrackTs = 0.1;

/// Detection-study process; an unknown signal frequency is drawn from `rng`.
[[nodiscard]] ProcessParams detect_params(Role role, bool known_freq, std::mt19937_64& rng);
[[nodiscard]] ProcessParams track_params(Role role, TrackScenario scenario);

/// Independent sub-seed for (master, trial, stream).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream);

}  // namespace maxflat
