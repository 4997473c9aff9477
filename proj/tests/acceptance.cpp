// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "maxflat/analyze.hpp"
#include "maxflat/design.hpp"
#include "maxflat/detector.hpp"
#include "maxflat/procsim.hpp"
#include "maxflat/realize.hpp"
#include "maxflat/tracker.hpp"

using namespace maxflat;

namespace {

// Criterion 1
constexpr double kBw1Q = 12.39, kBw1QTol = 0.05;
constexpr double kBw1Sigma = 0.066, kBw1SigmaTol = 0.003;
constexpr double kBw1Hwb = 0.167, kBw1HwbTol = 0.008;
constexpr double kNullTol = 1e-9;
constexpr double kBw1Seconds = 1.0;
// Criterion 2
constexpr double kTrackerDQ = 19.4, kTrackerDQTol = 0.1;
// Criterion 3
constexpr int kRandomSpecs = 50;
constexpr double kResidualTol = 1e-8;
// Criterion 4
constexpr double kRealizationTol = 1e-9;
constexpr std::size_t kImpulseSamples = 200;
// Criterion 5
constexpr double kWngTol = 1e-6;
// Criterion 6
constexpr double kQSpan = 10.0, kQStep = 0.05, kQSlack = 1e-12;
// Criterion 7
constexpr double kPolyTol = 1e-5;
// Criterion 8
constexpr double kOrbitTol = 1e-4;
constexpr double kOrbitSeconds = 30.0;
// Criterion 9
constexpr double kExpmTol = 1e-9;
constexpr double kNormTol = 1e-5;
// Criterion 10
constexpr std::size_t kTrials = 2000;
constexpr std::uint64_t kSeed = 1;
constexpr double kAucTol = 0.03;
constexpr double kDetectSeconds = 300.0;
// Criterion 11
constexpr double kSplitTol = 1e-8;
constexpr std::size_t kSplitGrid = 512;
constexpr double kBw0NcHwb = 0.48, kBw0NcHwbTol = 0.02;
// Criterion 12
constexpr double kSymmetryTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DesignSpec bw1_spec() {
  DesignSpec s;
  s.fs_hz = 1000.0;
  s.f_wb = 0.05;
  s.f_nb = 0.07;
  s.k_w_dc = 3;
  s.k_w_nb = 3;
  s.k_w_pi = 0;
  s.k_t = 3;
  return s;
}

std::vector<DesignSpec> acceptance_specs() {
  std::vector<DesignSpec> out{bw1_spec()};
  for (auto tag : {TrackerTag::A, TrackerTag::B, TrackerTag::C, TrackerTag::D}) out.push_back(TrackerConfig{tag}.spec());
  return out;
}

std::string label(const DesignSpec& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(Fs=%g dc=%d nb=%d pi=%d kt=%d)", s.fs_hz, s.k_w_dc, s.k_w_nb, s.k_w_pi, s.k_t);
  return buf;
}

// exp(M) by scaling and squaring of a Taylor series.
Eigen::Matrix3d expm(const Eigen::Matrix3d& M) {
  int s = 0;
  double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2.0;
    ++s;
  }
  const Eigen::Matrix3d A = M / std::pow(2.0, s);
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity(), sum = Eigen::Matrix3d::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * A / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome bw1_reproduction() {
  const auto t0 = Clock::now();
  const auto d = design_filterbank(bw1_spec());
  const double elapsed = seconds_since(t0);
  const double hwb = std::abs(frequency_response(d.b[0], d.a, kTwoPi * 0.05));
  const double hnb = std::abs(frequency_response(d.b[0], d.a, kTwoPi * 0.07));
  const bool ok = std::abs(d.q - kBw1Q) <= kBw1QTol && std::abs(d.sigma(0, 0) - kBw1Sigma) <= kBw1SigmaTol &&
                  std::abs(hwb - kBw1Hwb) <= kBw1HwbTol && hnb <= kNullTol && elapsed < kBw1Seconds;
  return {ok, fmt("q=%.4f sigma0=%.5f |H0(wb)|=%.5f |H0(nb)|=%.2e time=%.3fs", d.q, d.sigma(0, 0), hwb, hnb,
                  elapsed)};
}

Outcome tracker_d_delay() {
  const auto spec = TrackerConfig{TrackerTag::D}.spec();
  const double q07 = design_filterbank(spec).q;
  // The null must lie above the band edge, so the 0.05 reading sits just past it.
  auto edge = spec;
  edge.f_nb = 0.05 + 1e-9;
  const double q05 = design_filterbank(edge).q;
  const bool ok07 = std::abs(q07 - kTrackerDQ) <= kTrackerDQTol;
  const bool ok05 = std::abs(q05 - kTrackerDQ) <= kTrackerDQTol;
  return {ok07 || ok05, fmt("q(f_nb=0.07)=%.4f%s q(f_nb=0.05)=%.4f%s", q07, ok07 ? " matches" : "", q05,
                            ok05 ? " matches" : "")};
}

Outcome random_constraints() {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0, bad = 0;
  double worst_ratio = 0.0;
  while (done < kRandomSpecs) {
    DesignSpec s;
    s.fs_hz = std::pow(10.0, 1.0 + 3.0 * u(rng));
    s.f_wb = 0.01 + 0.14 * u(rng);
    s.k_t = 1 + static_cast<int>(rng() % 3);
    s.k_w_dc = s.k_t + static_cast<int>(rng() % 4);
    s.k_w_nb = static_cast<int>(rng() % 3);
    s.k_w_pi = static_cast<int>(rng() % 2);
    if (s.order() > 12) continue;
    if (s.k_w_nb > 0) s.f_nb = s.f_wb + 0.02 + (0.45 - s.f_wb - 0.02) * u(rng);
    const auto d = design_filterbank(s);
    const auto sys = assemble_system(s, d.poles, d.delays);
    const double dn = sys.D.cwiseAbs().rowwise().sum().maxCoeff();
    const double ratio = d.residual / (kResidualTol * (1.0 + dn));
    worst_ratio = std::max(worst_ratio, ratio);
    const auto rep = verify_constraints(d);
    if (ratio > 1.0 || !rep.pass()) {
      ++bad;
      std::printf("    violation %s residual=%.3e\n", label(s).c_str(), d.residual);
      for (const auto& v : rep.violations()) std::printf("      %s\n", v.c_str());
    }
    ++done;
  }
  return {bad == 0, fmt("%d specs, %d violating, worst residual/bound=%.3f", done, bad, worst_ratio)};
}

Outcome realization_equivalence() {
  double worst = 0.0, worst_raw = 0.0;
  for (const auto& s : acceptance_specs()) {
    const auto d = design_filterbank(s);
    const auto dcf = to_dcf(d), ccf = to_ccf(d), dsf = to_dsf(d);
    std::vector<double> x(kImpulseSamples, 0.0);
    x[0] = 1.0;
    auto s1 = zero_state(dcf), s2 = zero_state(ccf), s3 = zero_state(dsf);
    const auto y1 = run_realization(dcf, s1, x);
    const auto y2 = run_realization(ccf, s2, x);
    const auto y3 = run_realization(dsf, s3, x);
    for (int kt = 0; kt < d.outputs(); ++kt) {
      const auto k = static_cast<std::size_t>(kt);
      const auto y4 = run_filter(d.b[k], d.a, x);
      // Output k_t carries 1/Ts^k_t; compared per sample.
      const double unit = std::pow(d.Ts, kt);
      for (std::size_t n = 0; n < kImpulseSamples; ++n) {
        for (double other : {y2[k][n], y3[k][n], y4[n]}) {
          worst = std::max(worst, std::abs(y1[k][n] - other) * unit);
          worst_raw = std::max(worst_raw, std::abs(y1[k][n] - other));
        }
      }
    }
  }
  return {worst <= kRealizationTol,
          fmt("max difference %.2e per-sample units (%.2e in output units)", worst, worst_raw)};
}

Outcome wng_consistency() {
  double worst = 0.0;
  for (const auto& s : acceptance_specs()) {
    const auto d = design_filterbank(s);
    for (int kt = 0; kt < d.outputs(); ++kt) {
      const double e = impulse_energy(d.b[static_cast<std::size_t>(kt)], d.a);
      worst = std::max(worst, std::abs(e - d.sigma(kt, kt)) / e);
    }
  }
  return {worst <= kWngTol, fmt("max relative difference %.2e", worst)};
}

Outcome q_optimality() {
  double worst = -INFINITY;
  std::string where;
  for (const auto& base : acceptance_specs()) {
    const auto d = design_filterbank(base);
    const double s0 = d.sigma(0, 0);
    const int steps = static_cast<int>(std::lround(2.0 * kQSpan / kQStep));
    for (int i = 0; i <= steps; ++i) {
      auto s = base;
      s.group_delay = d.q - kQSpan + kQStep * i;
      const double si = design_filterbank(s).sigma(0, 0);
      if (s0 - si > worst) {
        worst = s0 - si;
        where = label(base);
      }
    }
  }
  return {worst <= kQSlack, fmt("max sigma(q_opt) - sigma(q) = %.2e %s", worst, where.c_str())};
}

Outcome polynomial_unbiasedness() {
  double worst = 0.0;
  for (auto tag : {TrackerTag::A, TrackerTag::D}) {
    const auto s = TrackerConfig{tag}.spec();
    const auto d = design_filterbank(s);
    const double settle = 10.0 * s.order() / s.omega_wb();
    const std::size_t N = static_cast<std::size_t>(settle) + 400;
    for (int deg = 0; deg < s.k_w_dc; ++deg) {
      std::vector<double> x(N);
      for (std::size_t n = 0; n < N; ++n) x[n] = std::pow(static_cast<double>(n) * d.Ts, deg);
      RealFilterbank bank(d);
      const auto y = bank.run(x);
      for (int kt = 0; kt < d.outputs(); ++kt) {
        for (std::size_t n = static_cast<std::size_t>(settle); n < N; ++n) {
          const double t = (static_cast<double>(n) - d.q) * d.Ts;
          const double truth = kt > deg ? 0.0 : factorial(deg) / factorial(deg - kt) * std::pow(t, deg - kt);
          const double scale =
              std::max(std::abs(truth), std::pow(static_cast<double>(n) * d.Ts, deg - std::min(kt, deg)));
          worst = std::max(worst, std::abs(y[static_cast<std::size_t>(kt)][n] - truth) / scale);
        }
      }
    }
  }
  return {worst <= kPolyTol, fmt("max relative error %.2e", worst)};
}

Outcome orbit_agreement() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int undefined = 0;
  for (auto tag : {TrackerTag::A, TrackerTag::B, TrackerTag::C, TrackerTag::D}) {
    const auto d = design_filterbank(TrackerConfig{tag}.spec());
    for (double f : default_orbit_grid()) {
      const auto o = orbit_simulation(d, f, 1.0);
      worst = std::max(worst, std::abs(o.measured.eps_r - o.predicted.eps_r));
      if (o.angle_defined) {
        worst = std::max(worst, std::abs(wrap_angle(o.measured.eps_theta - o.predicted.eps_theta)));
      } else {
        ++undefined;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= kOrbitTol && elapsed < kOrbitSeconds,
          fmt("max |measured - predicted| %.2e, %d nulled rows without angle, time=%.2fs", worst, undefined,
              elapsed)};
}

Outcome process_model() {
  std::mt19937_64 rng(0);
  const std::vector<std::pair<ProcessParams, double>> cases{
      {detect_params(Role::Signal, true, rng), 1.0 / kDetectFs},
      {detect_params(Role::Interference, true, rng), 1.0 / kDetectFs},
      {track_params(Role::Signal, TrackScenario::LoG), kTrackTs},
      {track_params(Role::Signal, TrackScenario::HiG), kTrackTs},
      {track_params(Role::Interference, TrackScenario::LoG), kTrackTs}};
  double worst_expm = 0.0, worst_norm = 0.0;
  for (const auto& [params, Ts] : cases) {
    const auto p = discretize_process(params, Ts);
    const double s = params.sigma(), w = params.omega();
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    M(0, 1) = 1.0;
    M(1, 0) = -(s * s + w * w);
    M(1, 1) = 2.0 * s;
    M(1, 2) = 1.0;
    const Eigen::Matrix3d E = expm(M * Ts);
    worst_expm = std::max(worst_expm, (p.G - E.topLeftCorner<2, 2>()).cwiseAbs().maxCoeff());
    worst_expm = std::max(worst_expm, (p.H - E.topRightCorner<2, 1>()).cwiseAbs().maxCoeff());
    worst_norm = std::max(worst_norm, std::abs(verify_normalization(params) - 1.0));
  }
  return {worst_expm <= kExpmTol && worst_norm <= kNormTol,
          fmt("max |G,H - expm| %.2e, max |energy - 1| %.2e", worst_expm, worst_norm)};
}

Outcome detection_auc() {
  const auto t0 = Clock::now();
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<std::pair<DetectorTag, double>> table{{DetectorTag::IIR_BW1, 0.937},
                                                          {DetectorTag::FIR_NUL_NC, 0.840},
                                                          {DetectorTag::IIR_BW1_NC, 0.935},
                                                          {DetectorTag::IIR_BW0_NC, 0.911}};
  bool ok = true;
  std::string detail;
  for (const auto& [tag, target] : table) {
    const auto res = run_detection_mc(build_detector({tag}), kTrials, kSeed, {}, threads);
    ok = ok && std::abs(res.roc.auc - target) <= kAucTol;
    detail += fmt("%s=%.3f (target %.3f) ", tag_name(tag).c_str(), res.roc.auc, target);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < kDetectSeconds;
  return {ok, detail + fmt("time=%.1fs", elapsed)};
}

Outcome noncausal_split() {
  DesignSpec bw0;
  bw0.fs_hz = 1000.0;
  bw0.f_wb = 0.05;
  bw0.k_w_dc = 8;
  bw0.k_t = 1;
  bw0.causal = false;
  bw0.pole_mapping = PoleMapping::Bilinear;
  DesignSpec bw1;
  bw1.fs_hz = 1000.0;
  bw1.f_wb = 0.05;
  bw1.f_nb = 0.07;
  bw1.k_w_dc = 4;
  bw1.k_w_nb = 2;
  bw1.k_t = 1;
  bw1.causal = false;
  double worst = 0.0;
  for (const auto& s : {bw0, bw1}) {
    const auto nc = noncausal_design(s);
    const auto& f = nc.forward;
    const auto& b = nc.backward;
    for (double w : uniform_grid(kSplitGrid)) {
      const Complex direct = basis_sum_response(nc.poles, nc.C.col(0), w);
      const Complex split = frequency_response(f.b[0], f.a, w) +
                            frequency_response(b.b[0], b.a, -w) * std::polar(1.0, w);
      worst = std::max(worst, std::abs(direct - split));
    }
  }
  const auto nc0 = noncausal_design(bw0);
  const double hwb = std::abs(basis_sum_response(nc0.poles, nc0.C.col(0), bw0.omega_wb()));
  return {worst <= kSplitTol && std::abs(hwb - kBw0NcHwb) <= kBw0NcHwbTol,
          fmt("max |H_fwd + H_bwd - H| %.2e, BW0 NC |H(wb)|=%.4f", worst, hwb)};
}

Outcome property_suite() {
  std::vector<std::string> failed;
  double sym = 0.0, null = 0.0;
  auto specs = acceptance_specs();
  DesignSpec with_pi = bw1_spec();
  with_pi.k_w_pi = 1;
  specs.push_back(with_pi);
  for (const auto& s : specs) {
    const auto d = design_filterbank(s);
    for (int kt = 0; kt < d.outputs(); ++kt) {
      const auto& b = d.b[static_cast<std::size_t>(kt)];
      for (double w : uniform_grid(257)) {
        const Complex pos = frequency_response(b, d.a, w);
        const Complex neg = frequency_response(b, d.a, -w);
        sym = std::max(sym, std::abs(neg - std::conj(pos)) / std::max(1.0, std::abs(pos)));
      }
      // Per-sample units for derivative outputs.
      const double unit = std::pow(d.Ts, kt);
      if (s.k_w_nb > 0)
        for (double w : {s.omega_nb(), -s.omega_nb()}) null = std::max(null, std::abs(frequency_response(b, d.a, w)) * unit);
      if (s.k_w_pi > 0) null = std::max(null, std::abs(frequency_response(b, d.a, kPi)) * unit);
    }
  }
  if (sym > kSymmetryTol) failed.push_back("conjugate symmetry");
  if (null > kNullTol) failed.push_back("null placement");

  const auto det = build_detector({DetectorTag::IIR_BW1});
  const auto r1 = run_detection_mc(det, 100, 77);
  const auto r2 = run_detection_mc(det, 100, 77);
  const auto rt = run_detection_mc(det, 100, 77, {}, 3);
  const auto d_trk = design_filterbank(TrackerConfig{TrackerTag::B}.spec());
  const bool same = r1.true_stats == r2.true_stats && r1.false_stats == r2.false_stats &&
                    r1.true_stats == rt.true_stats && r1.false_stats == rt.false_stats &&
                    run_tracking_mc(d_trk, {}, 9).rms_error == run_tracking_mc(d_trk, {}, 9).rms_error;
  if (!same) failed.push_back("seed determinism");

  bool monotone = true;
  for (std::size_t i = 1; i < r1.roc.points.size(); ++i) {
    const auto& a = r1.roc.points[i - 1];
    const auto& b = r1.roc.points[i];
    monotone = monotone && b.threshold < a.threshold && b.p_fa >= a.p_fa && b.p_d >= a.p_d;
  }
  monotone = monotone && r1.roc.points.back().p_fa == 1.0 && r1.roc.points.back().p_d == 1.0;
  if (!monotone) failed.push_back("ROC monotonicity");

  // Constant detector and identically distributed statistics.
  const std::size_t n = 2000;
  const std::vector<double> flat(n, 1.0);
  const double auc_const = roc_from_statistics(flat, flat).auc;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = nd(rng);
  for (auto& v : b) v = nd(rng);
  const double auc_noise = roc_from_statistics(a, b).auc;
  // Three standard errors of the Mann-Whitney statistic under the null.
  const double se = std::sqrt((2.0 * n + 1.0) / (12.0 * n * n));
  if (auc_const != 0.5 || std::abs(auc_noise - 0.5) > 3.0 * se) failed.push_back("AUC chance calibration");

  std::string detail = fmt("symmetry %.1e, null %.1e, chance AUC %.4f (+-%.4f)", sym, null, auc_noise, 3.0 * se);
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  report(1, "BW1 design reproduction", bw1_reproduction);
  report(2, "Tracker D delay", tracker_d_delay);
  report(3, "constraint satisfaction", random_constraints);
  report(4, "realization equivalence", realization_equivalence);
  report(5, "white-noise gain consistency", wng_consistency);
  report(6, "delay optimality", q_optimality);
  report(7, "polynomial unbiasedness", polynomial_unbiasedness);
  report(8, "orbit agreement", orbit_agreement);
  report(9, "process model", process_model);
  report(10, "detection AUC", detection_auc);
  report(11, "non-causal split", noncausal_split);
  report(12, "property suite", property_suite);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
