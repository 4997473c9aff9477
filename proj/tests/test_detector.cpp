#include <doctest.h>

#include <cmath>
#include <random>

#include "maxflat/analyze.hpp"
#include "maxflat/detector.hpp"
#include "maxflat/error.hpp"
#include "maxflat/procsim.hpp"

using namespace maxflat;

namespace {

double apply(const std::array<double, 3>& h, const std::vector<double>& x, std::size_t n) {
  return h[0] * x[n] + h[1] * x[n - 1] + h[2] * x[n - 2];
}

}  // namespace

TEST_CASE("three-point kernels differentiate polynomials exactly") {
  const double Ts = 0.01;
  const auto h = three_point_kernels(Ts);
  std::vector<double> ramp, quad;
  for (int n = 0; n < 10; ++n) {
    ramp.push_back(3.0 * n * Ts + 1.0);
    quad.push_back(std::pow(n * Ts, 2));
  }
  for (std::size_t n = 2; n < 10; ++n) {
    CHECK(apply(h[0], ramp, n) == doctest::Approx(ramp[n - 1]));
    CHECK(apply(h[1], ramp, n) == doctest::Approx(3.0));
    CHECK(std::abs(apply(h[2], ramp, n)) < 1e-9);
    CHECK(apply(h[1], quad, n) == doctest::Approx(2.0 * (n - 1) * Ts));
    CHECK(apply(h[2], quad, n) == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS((void)three_point_kernels(0.0), ValidationError);
}

TEST_CASE("TK operator") {
  const double A = 1.7, W = 0.3;
  std::vector<double> x;
  for (int n = 0; n < 50; ++n) x.push_back(A * std::cos(W * n + 0.4));
  const auto nc = tk_energy_threepoint(x, false, 1.0);
  const auto c = tk_energy_threepoint(x, true, 1.0);
  const double expected = A * A * std::sin(W) * std::sin(W);
  for (std::size_t n = 2; n + 1 < x.size(); ++n) {
    CHECK(nc[n] == doctest::Approx(expected));
    CHECK(c[n] == doctest::Approx(expected));
  }
  CHECK(c[0] == 0.0);
  CHECK(nc.back() == 0.0);

  const std::vector<double> flat(10, 2.5), zero(10, 0.0);
  for (double e : tk_energy_threepoint(flat, false, 1.0)) CHECK(std::abs(e) < 1e-15);
  for (double e : tk_energy_threepoint(zero, true, 1.0)) CHECK(e == 0.0);
  CHECK_THROWS_AS((void)tk_energy_threepoint(std::vector<double>{1.0, 2.0}, true, 1.0), ValidationError);

  // Continuous form on an exact harmonic: A^2 Omega^2.
  std::vector<double> y0, y1, y2;
  for (int n = 0; n < 20; ++n) {
    const double t = 0.013 * n;
    y0.push_back(A * std::cos(9.0 * t));
    y1.push_back(-9.0 * A * std::sin(9.0 * t));
    y2.push_back(-81.0 * A * std::cos(9.0 * t));
  }
  for (double e : tk_energy_derivatives(y0, y1, y2)) CHECK(e == doctest::Approx(81.0 * A * A));
}

TEST_CASE("detector tags") {
  for (auto tag : all_tags()) CHECK(parse_tag(tag_name(tag)) == tag);
  CHECK(all_tags().size() == 5);
  try {
    (void)parse_tag("IIR_BW9");
    FAIL("no throw");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("IIR_BW1_NC") != std::string::npos);
  }
}

TEST_CASE("ROC construction") {
  const std::vector<double> t{3.0, 1.0, 2.0}, f{0.5, 1.5, 2.5};
  const auto roc = roc_from_statistics(t, f);
  CHECK(roc.points.front().p_fa == 0.0);
  CHECK(roc.points.front().p_d == 0.0);
  CHECK(roc.points.back().p_fa == 1.0);
  CHECK(roc.points.back().p_d == 1.0);
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    CHECK(roc.points[i].p_fa >= roc.points[i - 1].p_fa);
    CHECK(roc.points[i].p_d >= roc.points[i - 1].p_d);
    CHECK(roc.points[i].threshold < roc.points[i - 1].threshold);
  }
  // Mann-Whitney: pairs with t > f, ties counted half.
  CHECK(roc.auc == doctest::Approx(6.0 / 9.0));

  const std::vector<double> same(10, 1.0);
  CHECK(roc_from_statistics(same, same).auc == doctest::Approx(0.5));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::vector<double> a(4000), b(4000);
  for (auto& v : a) v = nd(rng);
  for (auto& v : b) v = nd(rng);
  CHECK(std::abs(roc_from_statistics(a, b).auc - 0.5) < 3.0 / std::sqrt(4000.0));

  std::vector<double> hi{2.0, 3.0}, lo{0.0, 1.0};
  CHECK(roc_from_statistics(hi, lo).auc == 1.0);
  CHECK(roc_from_statistics(lo, hi).auc == 0.0);
  CHECK_THROWS_AS((void)roc_from_statistics(std::vector<double>{}, lo), ValidationError);
}

TEST_CASE("detector summaries") {
  for (auto tag : all_tags()) {
    const auto s = build_detector({tag}).summary();
    CHECK(s.name == tag_name(tag));
    CHECK(s.sigma0 > 0.0);
    CHECK(std::isfinite(s.q));
  }
  const auto bw1 = build_detector({DetectorTag::IIR_BW1}).summary();
  CHECK(bw1.h_nb < 1e-8);
  CHECK(bw1.q == doctest::Approx(12.39).epsilon(1e-3));
  const auto bw0 = build_detector({DetectorTag::IIR_BW0}).summary();
  CHECK(bw0.q == doctest::Approx(13.30).epsilon(1e-3));
  CHECK(build_detector({DetectorTag::IIR_BW1_NC}).summary().h_nb < 1e-8);
  CHECK(build_detector({DetectorTag::FIR_NUL_NC}).summary().h_wb == doctest::Approx(1.0));
}

TEST_CASE("BW1 energy tracks the clean pulse envelope") {
  const auto det = build_detector({DetectorTag::IIR_BW1});
  // Well inside the passband: 0.01 cycles per sample.
  const ProcessParams params{0.08, 0.1};
  const double Ts = 1e-3;
  const auto proc = discretize_process(params, Ts);
  const std::size_t N = 1000;
  const auto x = generate_waveform(proc, {InputKind::Deterministic, 400, 400, 1.0, 0}, N);
  const auto e = det.energy(x);
  // Ideal envelope of the continuous impulse response: (A Ts b0)^2 e^{2 sigma t}.
  const double A = std::sqrt(1.0 / Ts);
  const double q = det.summary().q;
  const double sigma = params.sigma();
  double worst = 0.0;
  for (int n = 470; n <= 530; ++n) {
    const double t = (n - 400 - q) * Ts;
    const double ideal = std::pow(A * Ts * params.b0(), 2) * std::exp(2.0 * sigma * t);
    worst = std::max(worst, std::abs(e[static_cast<std::size_t>(n)] / ideal - 1.0));
  }
  MESSAGE("worst relative envelope error " << worst);
  CHECK(worst < 0.25);
}

TEST_CASE("detection Monte Carlo is deterministic and thread invariant") {
  const auto det = build_detector({DetectorTag::IIR_BW1});
  const auto r1 = run_detection_mc(det, 24, 11);
  const auto r2 = run_detection_mc(det, 24, 11);
  const auto r4 = run_detection_mc(det, 24, 11, {}, 4);
  CHECK(r1.true_stats == r2.true_stats);
  CHECK(r1.false_stats == r2.false_stats);
  CHECK(r1.true_stats == r4.true_stats);
  CHECK(r1.false_stats == r4.false_stats);
  CHECK(r1.roc.auc == r4.roc.auc);
  const auto other = run_detection_mc(det, 24, 12);
  CHECK(other.true_stats != r1.true_stats);
  CHECK_THROWS_AS((void)run_detection_mc(det, 0, 1), ValidationError);
  CHECK_THROWS_AS((void)run_detection_mc(build_detector({DetectorTag::IIR_BW1, 500.0}), 2, 1), ValidationError);
}
