#include "maxflat/procsim.hpp"

#include <cmath>

#include "maxflat/error.hpp"

namespace maxflat {

void ProcessParams::validate() const {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) throw ValidationError("tau_c > 0 violated");
  if (!(lambda_c > 0.0)) throw ValidationError("lambda_c > 0 violated");
}

double ProcessParams::b0() const {
  const double s = sigma();
  const double w = omega();
  return std::sqrt(-4.0 * s * (s * s + w * w));
}

DiscreteProcess discretize_process(const ProcessParams& params, double Ts) {
  params.validate();
  if (!(Ts > 0.0)) throw ValidationError("T_s > 0 violated");
  const double s = params.sigma();
  const double w = params.omega();
  if (!(w > 0.0) || !std::isfinite(params.lambda_c)) throw ValidationError("degenerate oscillator");
  const double e = std::exp(s * Ts);
  const double c = std::cos(w * Ts);
  const double sn = std::sin(w * Ts);
  const double w2 = s * s + w * w;
  DiscreteProcess p;
  p.Ts = Ts;
  p.G << e * (c - s / w * sn), e * sn / w,
         -w2 / w * e * sn, e * (c + s / w * sn);
  p.H << 1.0 / w2 - e * (c - s / w * sn) / w2, e * sn / w;
  p.C << params.b0(), 0.0;
  return p;
}

double verify_normalization(const ProcessParams& params, double b0_scale) {
  params.validate();
  const double s = params.sigma();
  const double w = params.omega();
  const double amp = b0_scale * params.b0() / w;
  const double dt = params.tau_c / 1.0e4;
  const long n = 200000;  // 20 tau_c
  auto f = [&](double t) {
    const double h = amp * std::exp(s * t) * std::sin(w * t);
    return h * h;
  };
  // Composite Simpson.
  double acc = f(0.0) + f(n * dt);
  for (long i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * dt);
  return acc * dt / 3.0;
}

std::vector<double> generate_waveform(const DiscreteProcess& process, const InputSpec& input, std::size_t N) {
  if (input.n0 < 0 || input.n1 < input.n0 || static_cast<std::size_t>(input.n1) >= N) {
    throw ValidationError("0 <= n0 <= n1 < N violated");
  }
  if (input.power < 0.0) throw ValidationError("input power >= 0 violated");
  const double scale = std::sqrt(input.power / process.Ts);
  std::mt19937_64 rng(input.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(N, 0.0);
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
  for (std::size_t n = 0; n < N; ++n) {
    double x = 0.0;
    if (static_cast<long>(n) >= input.n0 && static_cast<long>(n) <= input.n1) {
      x = input.kind == InputKind::Deterministic ? scale : scale * normal(rng);
    }
    w = process.G * w + process.H * x;
    y[n] = process.C * w;
  }
  return y;
}

ProcessParams detect_params(Role role, bool known_freq, std::mt19937_64& rng) {
  constexpr double alpha_tau = 4.0;
  const double Ts = 1.0 / kDetectFs;
  const double fc = role == Role::Signal ? kSignalFreq : kInterferenceFreq;
  double f = fc;
  if (role == Role::Signal && !known_freq) {
    std::uniform_real_distribution<double> u(0.0, fc);
    do {
      f = u(rng);
    } while (f <= 0.0);
  }
  return {alpha_tau * Ts / fc, 1.0 / (kDetectFs * f)};
}

ProcessParams track_params(Role role, TrackScenario scenario) {
  constexpr double alpha_tau = 8.0;
  const double fc = role == Role::Signal ? kSignalFreq : kInterferenceFreq;
  double alpha_lambda = 1.0;
  if (role == Role::Signal) alpha_lambda = scenario == TrackScenario::LoG ? 8.0 : 2.0;
  return {alpha_tau * kTrackTs / fc, alpha_lambda * kTrackTs / fc};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ (stream * 0x632be59bd9b4e019ULL));
}

}  // namespace maxflat
