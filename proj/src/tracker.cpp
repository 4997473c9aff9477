#include "maxflat/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "maxflat/error.hpp"
#include "maxflat/realize.hpp"

namespace maxflat {

std::string tracker_name(TrackerTag tag) {
  switch (tag) {
    case TrackerTag::A: return "A";
    case TrackerTag::B: return "B";
    case TrackerTag::C: return "C";
    case TrackerTag::D: return "D";
  }
  return "?";
}

TrackerTag parse_tracker(const std::string& name) {
  if (name == "A") return TrackerTag::A;
  if (name == "B") return TrackerTag::B;
  if (name == "C") return TrackerTag::C;
  if (name == "D") return TrackerTag::D;
  throw ValidationError("unknown tracker '" + name + "'; supported: A, B, C, D");
}

DesignSpec TrackerConfig::spec() const {
  DesignSpec s;
  s.fs_hz = 1.0 / ts;
  s.f_wb = f_wb;
  s.f_nb = f_nb;
  s.k_t = k_t;
  switch (tag) {
    case TrackerTag::A: s.k_w_dc = 3; s.k_w_nb = 0; break;
    case TrackerTag::B: s.k_w_dc = 3; s.k_w_nb = 1; break;
    case TrackerTag::C: s.k_w_dc = 3; s.k_w_nb = 3; break;
    case TrackerTag::D: s.k_w_dc = 6; s.k_w_nb = 1; break;
  }
  if (s.k_w_nb == 0) s.f_nb.reset();
  return s;
}

Track2D run_track(const FilterbankDesign& design, std::span<const double> meas_x, std::span<const double> meas_y,
                  bool warm_start) {
  if (meas_x.size() != meas_y.size()) throw ValidationError("measurement sequences must have equal length");
  RealFilterbank fx(design);
  RealFilterbank fy(design);
  if (warm_start && !meas_x.empty()) {
    fx.warm_start(meas_x[0]);
    fy.warm_start(meas_y[0]);
  }
  return {fx.run(meas_x), fy.run(meas_y)};
}

double interpolate(std::span<const double> v, double t) {
  if (v.empty()) return 0.0;
  if (t <= 0.0) return v.front();
  const double last = static_cast<double>(v.size() - 1);
  if (t >= last) return v.back();
  const auto i = static_cast<std::size_t>(std::floor(t));
  const double f = t - static_cast<double>(i);
  return (1.0 - f) * v[i] + f * v[i + 1];
}

std::vector<double> default_orbit_grid() { return {0.001, 0.005, 0.01, 0.025, 0.05, 0.07}; }

OrbitComparison orbit_simulation(const FilterbankDesign& design, double f_orb, double r_orb, int revolutions,
                                 double cx, double cy) {
  if (revolutions < 1) throw ValidationError("revolutions >= 1 violated");
  OrbitComparison out;
  out.f_orb = f_orb;
  out.predicted = orbit_steady_state(design.b[0], design.a, f_orb, r_orb, design.q);

  double rmax = 0.0;
  for (auto p : design.poles.poles) rmax = std::max(rmax, std::abs(p));
  const double settle = rmax > 0.0 ? std::log(1e-12) / std::log(rmax) : 1.0;
  std::size_t N;
  if (f_orb > 0.0) {
    const double per_rev = 1.0 / f_orb;
    const double revs = std::max<double>(revolutions, std::ceil(settle / per_rev));
    N = static_cast<std::size_t>(std::llround(revs * per_rev)) + 1;
  } else {
    N = static_cast<std::size_t>(std::ceil(settle)) + 1;
  }
  out.samples = N;

  const double w = kTwoPi * f_orb;
  std::vector<double> mx(N), my(N);
  for (std::size_t n = 0; n < N; ++n) {
    mx[n] = cx + r_orb * std::cos(w * static_cast<double>(n));
    my[n] = cy + r_orb * std::sin(w * static_cast<double>(n));
  }
  const auto track = run_track(design, mx, my, true);
  const std::size_t n = N - 1;
  const Complex est(track.est_x()[n] - cx, track.est_y()[n] - cy);
  const double truth_angle = w * (static_cast<double>(n) - design.q);
  out.measured.eps_r = std::abs(est) - r_orb;
  out.angle_defined = std::abs(est) > 1e-6 * std::max(1.0, r_orb);
  out.measured.eps_theta = out.angle_defined ? wrap_angle(std::arg(est) - truth_angle) : 0.0;
  return out;
}

TrackingResult run_tracking_mc(const FilterbankDesign& design, const TrackingScenario& sc, std::uint64_t seed) {
  if (sc.N < 2) throw ValidationError("N >= 2 violated");
  const double Ts = design.Ts;
  const auto sig = discretize_process(track_params(Role::Signal, sc.kind), Ts);
  const auto interf = discretize_process(track_params(Role::Interference, sc.kind), Ts);
  const long last = static_cast<long>(sc.N) - 1;

  std::mt19937_64 origin_rng(derive_seed(seed, 0, 0));
  std::uniform_real_distribution<double> box(-sc.origin_box, sc.origin_box);
  const double ox = sc.origin_box > 0.0 ? box(origin_rng) : 0.0;
  const double oy = sc.origin_box > 0.0 ? box(origin_rng) : 0.0;

  TrackingResult res;
  res.truth_x = generate_waveform(sig, {InputKind::Stochastic, 0, last, sc.p_sig, derive_seed(seed, 0, 1)}, sc.N);
  res.truth_y = generate_waveform(sig, {InputKind::Stochastic, 0, last, sc.p_sig, derive_seed(seed, 0, 2)}, sc.N);
  const auto ix = generate_waveform(interf, {InputKind::Stochastic, 0, last, sc.p_int, derive_seed(seed, 0, 3)}, sc.N);
  const auto iy = generate_waveform(interf, {InputKind::Stochastic, 0, last, sc.p_int, derive_seed(seed, 0, 4)}, sc.N);
  res.meas_x.resize(sc.N);
  res.meas_y.resize(sc.N);
  for (std::size_t n = 0; n < sc.N; ++n) {
    res.truth_x[n] += ox;
    res.truth_y[n] += oy;
    res.meas_x[n] = res.truth_x[n] + ix[n];
    res.meas_y[n] = res.truth_y[n] + iy[n];
  }
  res.track = run_track(design, res.meas_x, res.meas_y, true);
  res.q = design.q;
  res.settle = static_cast<std::size_t>(std::ceil(10.0 * std::max(design.q, 1.0)));
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t n = res.settle; n < sc.N; ++n) {
    const double t = static_cast<double>(n) - design.q;
    const double dx = res.track.est_x()[n] - interpolate(res.truth_x, t);
    const double dy = res.track.est_y()[n] - interpolate(res.truth_y, t);
    acc += dx * dx + dy * dy;
    ++count;
  }
  res.rms_error = count ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
  return res;
}

}  // namespace maxflat
