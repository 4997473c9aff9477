#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maxflat/analyze.hpp"
#include "maxflat/design.hpp"
#include "maxflat/procsim.hpp"

namespace maxflat {

enum class TrackerTag { A, B, C, D };

[[nodiscard]] std::string tracker_name(TrackerTag tag);
/// Accepts "A".."D"; throws ValidationError otherwise.
[[nodiscard]] TrackerTag parse_tracker(const std::string& name);

struct TrackerConfig {
  TrackerTag tag = TrackerTag::A;
  double f_wb = 0.05;
  double f_nb = 0.07;
  double ts = kTrackTs;
  int k_t = 3;

  [[nodiscard]] DesignSpec spec() const;
};

/// Per-axis filterbank outputs; index k_t selects position, velocity, acceleration.
struct Track2D {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;

  [[nodiscard]] const std::vector<double>& est_x() const { return x.at(0); }
  [[nodiscard]] const std::vector<double>& est_y() const { return y.at(0); }
};

/// Filters each coordinate with its own copy of the same (CCF) realization.
/// With `warm_start` both filters begin in steady state for the first sample.
[[nodiscard]] Track2D run_track(const FilterbankDesign& design, std::span<const double> meas_x,
                                std::span<const double> meas_y, bool warm_start = false);

struct OrbitComparison {
  double f_orb = 0.0;
  OrbitError predicted;
  OrbitError measured;
  /// False where the response vanishes and the angle is undefined.
  bool angle_defined = true;
  std::size_t samples = 0;
};

/// Circular orbit about (cx, cy); errors measured at the last sample against
/// the truth lagged by q. Runs whole revolutions until both `revolutions` and
/// the slowest pole's transient (below 1e-12) are covered.
[[nodiscard]] OrbitComparison orbit_simulation(const FilterbankDesign& design, double f_orb, double r_orb,
                                               int revolutions = 10, double cx = 0.0, double cy = 0.0);

[[nodiscard]] std::vector<double> default_orbit_grid();

struct TrackingScenario {
  TrackScenario kind = TrackScenario::LoG;
  std::size_t N = 2000;
  double p_sig = 1.0e4;
  double p_int = 1.0e2;
  /// Origin drawn uniformly from [-origin_box, origin_box]^2.
  double origin_box = 1000.0;
};

struct TrackingResult {
  Track2D track;
  std::vector<double> truth_x, truth_y;
  std::vector<double> meas_x, meas_y;
  double q = 0.0;
  std::size_t settle = 0;
  /// Lag-adjusted RMS position error after the settling window.
  double rms_error = 0.0;
};

[[nodiscard]] TrackingResult run_tracking_mc(const FilterbankDesign& design, const TrackingScenario& scenario,
                                             std::uint64_t seed);

/// Value of `v` at fractional index t by linear interpolation (clamped).
[[nodiscard]] double interpolate(std::span<const double> v, double t);

}  // namespace maxflat
