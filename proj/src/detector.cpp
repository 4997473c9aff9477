#include "maxflat/detector.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "maxflat/analyze.hpp"
#include "maxflat/butter.hpp"
#include "maxflat/error.hpp"
#include "maxflat/procsim.hpp"
#include "maxflat/realize.hpp"

namespace maxflat {

std::array<std::array<double, 3>, 3> three_point_kernels(double Ts) {
  if (!(Ts > 0.0)) throw ValidationError("T_s > 0 violated");
  return {{{0.0, 1.0, 0.0}, {0.5 / Ts, 0.0, -0.5 / Ts}, {1.0 / (Ts * Ts), -2.0 / (Ts * Ts), 1.0 / (Ts * Ts)}}};
}

std::vector<double> tk_energy_threepoint(std::span<const double> x, bool causal, double Ts) {
  if (x.size() < 3) throw ValidationError("TK operator needs at least three samples");
  const double s = 1.0 / (Ts * Ts);
  std::vector<double> e(x.size(), 0.0);
  if (causal) {
    for (std::size_t n = 2; n < x.size(); ++n) e[n] = (x[n - 1] * x[n - 1] - x[n - 2] * x[n]) * s;
  } else {
    for (std::size_t n = 1; n + 1 < x.size(); ++n) e[n] = (x[n] * x[n] - x[n - 1] * x[n + 1]) * s;
  }
  return e;
}

std::vector<double> tk_energy_derivatives(std::span<const double> y0, std::span<const double> y1,
                                          std::span<const double> y2) {
  if (y0.size() != y1.size() || y0.size() != y2.size()) throw ValidationError("TK inputs must have equal length");
  std::vector<double> e(y0.size());
  for (std::size_t n = 0; n < e.size(); ++n) e[n] = y1[n] * y1[n] - y0[n] * y2[n];
  return e;
}

namespace {

// Three-point derivative stage followed by the continuous-form combination.
// `advance` shifts the kernels one sample earlier (zero group delay).
std::vector<double> two_stage_energy(std::span<const double> y, double Ts, bool advance) {
  const auto h = three_point_kernels(Ts);
  const std::size_t N = y.size();
  std::vector<double> d0(N, 0.0), d1(N, 0.0), d2(N, 0.0);
  const std::size_t shift = advance ? 1 : 0;
  for (std::size_t n = 2; n < N; ++n) {
    const std::size_t out = n - shift;
    const double window[3] = {y[n], y[n - 1], y[n - 2]};
    for (int m = 0; m < 3; ++m) {
      d0[out] += h[0][static_cast<std::size_t>(m)] * window[m];
      d1[out] += h[1][static_cast<std::size_t>(m)] * window[m];
      d2[out] += h[2][static_cast<std::size_t>(m)] * window[m];
    }
  }
  return tk_energy_derivatives(d0, d1, d2);
}

DesignSpec bw1_spec(const DetectorConfig& c) {
  DesignSpec s;
  s.fs_hz = c.fs_hz;
  s.f_wb = c.f_wb;
  s.f_nb = c.f_nb;
  s.k_w_dc = 3;
  s.k_w_nb = 3;
  s.k_t = 3;
  return s;
}

DesignSpec bw0_nc_spec(const DetectorConfig& c) {
  DesignSpec s;
  s.fs_hz = c.fs_hz;
  s.f_wb = c.f_wb;
  s.k_w_dc = 8;
  s.k_t = 1;
  s.causal = false;
  s.pole_mapping = PoleMapping::Bilinear;
  return s;
}

DesignSpec bw1_nc_spec(const DetectorConfig& c) {
  DesignSpec s;
  s.fs_hz = c.fs_hz;
  s.f_wb = c.f_wb;
  s.f_nb = c.f_nb;
  s.k_w_dc = 4;
  s.k_w_nb = 2;
  s.k_t = 1;
  s.causal = false;
  return s;
}

constexpr int kBw0Order = 6;

}  // namespace

std::string tag_name(DetectorTag tag) {
  switch (tag) {
    case DetectorTag::FIR_NUL_NC: return "FIR_NUL_NC";
    case DetectorTag::IIR_BW0: return "IIR_BW0";
    case DetectorTag::IIR_BW1: return "IIR_BW1";
    case DetectorTag::IIR_BW0_NC: return "IIR_BW0_NC";
    case DetectorTag::IIR_BW1_NC: return "IIR_BW1_NC";
  }
  return "?";
}

std::vector<DetectorTag> all_tags() {
  return {DetectorTag::FIR_NUL_NC, DetectorTag::IIR_BW0, DetectorTag::IIR_BW1, DetectorTag::IIR_BW0_NC,
          DetectorTag::IIR_BW1_NC};
}

DetectorTag parse_tag(const std::string& name) {
  std::string supported;
  for (auto t : all_tags()) {
    if (tag_name(t) == name) return t;
    supported += (supported.empty() ? "" : ", ") + tag_name(t);
  }
  throw ValidationError("unknown detector tag '" + name + "'; supported: " + supported);
}

Detector::Detector(const DetectorConfig& config) : config_(config), Ts_(1.0 / config.fs_hz) {
  if (!(config.fs_hz > 0.0)) throw ValidationError("F_s > 0 violated");
  switch (config.tag) {
    case DetectorTag::FIR_NUL_NC: break;
    case DetectorTag::IIR_BW0: {
      const auto tf = bilinear_butterworth_lowpass(kBw0Order, kTwoPi * config.f_wb * config.fs_hz, Ts_);
      bw0_b_ = tf.b;
      bw0_a_ = tf.a;
      break;
    }
    case DetectorTag::IIR_BW1: causal_ = design_filterbank(bw1_spec(config)); break;
    case DetectorTag::IIR_BW0_NC: noncausal_ = noncausal_design(bw0_nc_spec(config)); break;
    case DetectorTag::IIR_BW1_NC: noncausal_ = noncausal_design(bw1_nc_spec(config)); break;
  }
}

bool Detector::two_stage() const {
  return config_.tag == DetectorTag::IIR_BW0 || config_.tag == DetectorTag::IIR_BW0_NC ||
         config_.tag == DetectorTag::IIR_BW1_NC;
}

std::vector<double> Detector::smooth(std::span<const double> x) const {
  switch (config_.tag) {
    case DetectorTag::IIR_BW0: return run_filter(bw0_b_, bw0_a_, x);
    case DetectorTag::IIR_BW0_NC:
    case DetectorTag::IIR_BW1_NC: return run_noncausal(*noncausal_, x)[0];
    default: return {x.begin(), x.end()};
  }
}

std::vector<double> Detector::energy(std::span<const double> x) const {
  switch (config_.tag) {
    case DetectorTag::FIR_NUL_NC: return tk_energy_threepoint(x, false, Ts_);
    case DetectorTag::IIR_BW1: {
      RealFilterbank bank(*causal_);
      const auto y = bank.run(x);
      return tk_energy_derivatives(y[0], y[1], y[2]);
    }
    case DetectorTag::IIR_BW0: return two_stage_energy(smooth(x), Ts_, false);
    case DetectorTag::IIR_BW0_NC:
    case DetectorTag::IIR_BW1_NC: return two_stage_energy(smooth(x), Ts_, true);
  }
  return {};
}

DetectorSummary Detector::summary() const {
  DetectorSummary s;
  s.name = tag_name(config_.tag);
  const double wb = kTwoPi * config_.f_wb;
  const double wnb = kTwoPi * config_.f_nb;
  switch (config_.tag) {
    case DetectorTag::FIR_NUL_NC:
      s.q = 0.0;
      s.sigma0 = 1.0;
      s.h_wb = 1.0;
      s.h_nb = 1.0;
      break;
    case DetectorTag::IIR_BW0: {
      // h0 adds one sample of delay and leaves the magnitude unchanged.
      const double w3[3] = {0.0, 1e-4, 2e-4};
      s.q = measured_group_delay(bw0_b_, bw0_a_, w3)[1] + 1.0;
      s.sigma0 = impulse_energy(bw0_b_, bw0_a_);
      s.h_wb = std::abs(frequency_response(bw0_b_, bw0_a_, wb));
      s.h_nb = std::abs(frequency_response(bw0_b_, bw0_a_, wnb));
      break;
    }
    case DetectorTag::IIR_BW1:
      s.q = causal_->q;
      s.sigma0 = causal_->sigma(0, 0);
      s.h_wb = std::abs(frequency_response(causal_->b[0], causal_->a, wb));
      s.h_nb = std::abs(frequency_response(causal_->b[0], causal_->a, wnb));
      break;
    case DetectorTag::IIR_BW0_NC:
    case DetectorTag::IIR_BW1_NC:
      s.q = 0.0;
      s.sigma0 = noncausal_->sigma(0, 0);
      s.h_wb = std::abs(basis_sum_response(noncausal_->poles, noncausal_->C.col(0), wb));
      s.h_nb = std::abs(basis_sum_response(noncausal_->poles, noncausal_->C.col(0), wnb));
      break;
  }
  return s;
}

Detector build_detector(const DetectorConfig& config) { return Detector(config); }

RocCurve roc_from_statistics(std::span<const double> true_stats, std::span<const double> false_stats) {
  if (true_stats.empty() || false_stats.empty()) throw ValidationError("ROC needs at least one trial of each kind");
  std::vector<double> t(true_stats.begin(), true_stats.end());
  std::vector<double> f(false_stats.begin(), false_stats.end());
  std::sort(t.begin(), t.end(), std::greater<>());
  std::sort(f.begin(), f.end(), std::greater<>());
  std::vector<double> thresholds;
  thresholds.reserve(t.size() + f.size());
  std::merge(t.begin(), t.end(), f.begin(), f.end(), std::back_inserter(thresholds), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t it = 0, jf = 0;
  const double nt = static_cast<double>(t.size());
  const double nf = static_cast<double>(f.size());
  for (double th : thresholds) {
    while (it < t.size() && t[it] >= th) ++it;
    while (jf < f.size() && f[jf] >= th) ++jf;
    roc.points.push_back({th, static_cast<double>(jf) / nf, static_cast<double>(it) / nt});
  }
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& a = roc.points[i - 1];
    const auto& b = roc.points[i];
    roc.auc += (b.p_fa - a.p_fa) * 0.5 * (a.p_d + b.p_d);
  }
  return roc;
}

DetectionScenario DetectionScenario::non_deterministic() {
  DetectionScenario s;
  s.deterministic_signal = false;
  s.p_sig = 1.0;
  s.p_int = 1.0;
  s.sig_n0 = 400;
  s.sig_n1 = 450;
  return s;
}

namespace {

enum Stream : std::uint64_t { kFreqStream = 0, kSignalStream = 1, kInterf1Stream = 2, kInterf2Stream = 3 };

double window_max(const std::vector<double>& e, long lo, long hi) {
  double m = -std::numeric_limits<double>::infinity();
  for (long n = std::max(0L, lo); n <= hi && n < static_cast<long>(e.size()); ++n) m = std::max(m, e[static_cast<std::size_t>(n)]);
  return m;
}

}  // namespace

DetectionResult run_detection_mc(const Detector& detector, std::size_t trials, std::uint64_t seed,
                                 const DetectionScenario& sc, unsigned threads) {
  if (trials < 1) throw ValidationError("trials >= 1 violated");
  const double Ts = 1.0 / detector.config().fs_hz;
  if (detector.config().fs_hz != kDetectFs) throw ValidationError("detection scenario is defined for F_s = 1000 Hz");
  std::mt19937_64 fixed_rng(0);
  const auto interference = discretize_process(detect_params(Role::Interference, true, fixed_rng), Ts);

  DetectionResult res;
  res.trials = trials;
  res.seed = seed;
  res.true_stats.assign(trials, 0.0);
  res.false_stats.assign(trials, 0.0);

  auto run_trial = [&](std::size_t t) {
    std::mt19937_64 freq_rng(derive_seed(seed, t, kFreqStream));
    const auto sig = discretize_process(detect_params(Role::Signal, sc.known_signal_freq, freq_rng), Ts);
    InputSpec sin{sc.deterministic_signal ? InputKind::Deterministic : InputKind::Stochastic, sc.sig_n0, sc.sig_n1,
                  sc.p_sig, derive_seed(seed, t, kSignalStream)};
    InputSpec i1{InputKind::Stochastic, 0, static_cast<long>(sc.N) - 1, sc.p_int, derive_seed(seed, t, kInterf1Stream)};
    InputSpec i2 = i1;
    i2.seed = derive_seed(seed, t, kInterf2Stream);
    auto x1 = generate_waveform(sig, sin, sc.N);
    const auto n1 = generate_waveform(interference, i1, sc.N);
    for (std::size_t n = 0; n < sc.N; ++n) x1[n] += n1[n];
    const auto x2 = generate_waveform(interference, i2, sc.N);
    res.true_stats[t] = window_max(detector.energy(x1), sc.true_lo, sc.true_hi);
    res.false_stats[t] = window_max(detector.energy(x2), sc.false_lo, sc.false_hi);
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < trials; t += threads) run_trial(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  res.roc = roc_from_statistics(res.true_stats, res.false_stats);
  return res;
}

}  // namespace maxflat
