#include "maxflat/realize.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "maxflat/error.hpp"

namespace maxflat {

StateSpaceRealization to_dcf(const FilterbankDesign& design) {
  const int K = design.order();
  StateSpaceRealization r;
  r.form = RealizationForm::DCF;
  r.G = CMatrix::Zero(K, K);
  for (int k = 0; k < K; ++k) r.G(k, k) = design.poles.poles[static_cast<std::size_t>(k)];
  r.H = CVector::Ones(K);
  r.C = design.C.transpose();
  return r;
}

StateSpaceRealization to_ccf(const FilterbankDesign& design) {
  const int K = design.order();
  StateSpaceRealization r;
  r.form = RealizationForm::CCF;
  r.G = CMatrix::Zero(K, K);
  for (int k = 0; k < K; ++k) r.G(0, k) = -design.a[static_cast<std::size_t>(k + 1)];
  for (int k = 1; k < K; ++k) r.G(k, k - 1) = 1.0;
  r.H = CVector::Zero(K);
  r.H(0) = 1.0;
  r.C = CMatrix::Zero(design.outputs(), K);
  for (int kt = 0; kt < design.outputs(); ++kt)
    for (int k = 0; k < K; ++k) r.C(kt, k) = design.b[static_cast<std::size_t>(kt)][static_cast<std::size_t>(k)];
  return r;
}

StateSpaceRealization to_dsf(const FilterbankDesign& design) {
  const auto dcf = to_dcf(design);
  const int K = dcf.order();
  const int Kt = dcf.outputs();
  CMatrix c_aug = CMatrix::Identity(K, K);
  c_aug.topRows(Kt) = dcf.C;
  Eigen::FullPivLU<CMatrix> lu(c_aug);
  if (!lu.isInvertible()) throw NumericalError("DSF transform unavailable for this design");
  const CMatrix T = lu.inverse();
  StateSpaceRealization r;
  r.form = RealizationForm::DSF;
  r.G = c_aug * dcf.G * T;
  r.H = c_aug * dcf.H;
  r.C = CMatrix::Identity(Kt, K);
  return r;
}

FilterState zero_state(const StateSpaceRealization& r) { return {CVector::Zero(r.order()), 0}; }

std::vector<double> lss_step(const StateSpaceRealization& r, FilterState& state, double x) {
  if (state.w.size() != r.order()) throw ValidationError("state dimension does not match realization");
  state.w = r.G * state.w + r.H * x;
  ++state.n;
  const CVector y = r.C * state.w;
  std::vector<double> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (std::abs(y(k).imag()) > kComplexTol * std::max(1.0, std::abs(y(k).real()))) {
      throw NumericalError("realization inconsistency: complex output");
    }
    out[static_cast<std::size_t>(k)] = y(k).real();
  }
  return out;
}

std::vector<std::vector<double>> run_realization(const StateSpaceRealization& r, FilterState& state,
                                                 std::span<const double> x) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(r.outputs()), std::vector<double>(x.size()));
  for (std::size_t n = 0; n < x.size(); ++n) {
    const auto y = lss_step(r, state, x[n]);
    for (std::size_t k = 0; k < y.size(); ++k) out[k][n] = y[k];
  }
  return out;
}

RealFilterbank::RealFilterbank(const FilterbankDesign& design) : a_(design.a), b_(design.b) {
  reset();
  scratch_.resize(w_.size());
}

void RealFilterbank::reset() { w_.assign(static_cast<std::size_t>(order()), 0.0); }

void RealFilterbank::warm_start(double x0) {
  // In CCF every state entry equals the same delayed recursion value v, with
  // v = x0 / sum(a).
  double sa = 0.0;
  for (double c : a_) sa += c;
  if (std::abs(sa) < 1e-300) throw NumericalError("no steady state: pole at z = 1");
  std::fill(w_.begin(), w_.end(), x0 / sa);
}

void RealFilterbank::step(double x, std::span<double> y) {
  const std::size_t K = w_.size();
  double v = x;
  for (std::size_t k = 0; k < K; ++k) v -= a_[k + 1] * w_[k];
  for (std::size_t k = K; k-- > 1;) w_[k] = w_[k - 1];
  if (K > 0) w_[0] = v;
  for (std::size_t kt = 0; kt < b_.size(); ++kt) {
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) acc += b_[kt][k] * w_[k];
    y[kt] = acc;
  }
}

std::vector<std::vector<double>> RealFilterbank::run(std::span<const double> x) {
  std::vector<std::vector<double>> out(b_.size(), std::vector<double>(x.size()));
  std::vector<double> y(b_.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    step(x[n], y);
    for (std::size_t k = 0; k < y.size(); ++k) out[k][n] = y[k];
  }
  return out;
}

std::vector<double> run_filter(std::span<const double> b, std::span<const double> a, std::span<const double> x) {
  if (a.empty() || a[0] != 1.0) throw ValidationError("run_filter requires a[0] = 1");
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < b.size() && k <= n; ++k) acc += b[k] * x[n - k];
    for (std::size_t k = 1; k < a.size() && k <= n; ++k) acc -= a[k] * y[n - k];
    y[n] = acc;
  }
  return y;
}

FilterState initialize_state(const StateSpaceRealization& r, double x0) {
  FilterState s = zero_state(r);
  if (r.form == RealizationForm::DSF) {
    if (s.w.size() > 0) s.w(0) = x0;
    return s;
  }
  const CMatrix IminusG = CMatrix::Identity(r.order(), r.order()) - r.G;
  Eigen::FullPivLU<CMatrix> lu(IminusG);
  if (!lu.isInvertible()) throw NumericalError("no steady state: I - G is singular");
  s.w = lu.solve(r.H * x0);
  return s;
}

std::vector<std::vector<double>> run_noncausal(const NoncausalDesign& design, std::span<const double> x) {
  RealFilterbank fwd(design.forward);
  RealFilterbank bwd(design.backward);
  auto out = fwd.run(x);
  std::vector<double> rev(x.rbegin(), x.rend());
  const auto back = bwd.run(rev);
  const std::size_t N = x.size();
  // Reversed-time sample m maps to forward index N-1-m; the extra delay
  // places back[m] at forward index N-2-m.
  for (std::size_t kt = 0; kt < out.size(); ++kt) {
    for (std::size_t m = 0; m + 1 < N; ++m) out[kt][N - 2 - m] += back[kt][m];
  }
  return out;
}

}  // namespace maxflat
