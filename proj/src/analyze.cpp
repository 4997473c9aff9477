#include "maxflat/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxflat/error.hpp"
#include "maxflat/realize.hpp"

namespace maxflat {

std::vector<double> uniform_grid(std::size_t n) {
  if (n < 2) throw ValidationError("grid needs at least two points");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  return w;
}

Complex frequency_response(std::span<const double> b, std::span<const double> a, double omega) {
  // Coefficients multiply powers of z^-1, as in the difference equation.
  const Complex zi = std::polar(1.0, -omega);
  Complex num{0.0}, den{0.0};
  for (std::size_t k = b.size(); k-- > 0;) num = num * zi + b[k];
  for (std::size_t k = a.size(); k-- > 0;) den = den * zi + a[k];
  return num / den;
}

std::vector<Complex> frequency_response(std::span<const double> b, std::span<const double> a,
                                        std::span<const double> omegas) {
  std::vector<Complex> h(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) h[i] = frequency_response(b, a, omegas[i]);
  return h;
}

std::vector<Complex> ideal_response(int k_t, double q, double Ts, std::span<const double> omegas) {
  std::vector<Complex> d(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double w = omegas[i];
    d[i] = std::polar(1.0, -q * w) * std::pow(Complex(0.0, w / Ts), k_t);
  }
  return d;
}

std::vector<double> complex_error(std::span<const Complex> h, std::span<const Complex> ideal) {
  if (h.size() != ideal.size()) throw ValidationError("complex_error: grid mismatch");
  std::vector<double> e(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) e[i] = std::abs(h[i] - ideal[i]);
  return e;
}

std::vector<double> unwrapped_phase(std::span<const Complex> h) {
  std::vector<double> ph(h.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double raw = std::arg(h[i]);
    if (i > 0) {
      const double d = raw + offset - ph[i - 1];
      if (d > kPi) offset -= kTwoPi * std::round(d / kTwoPi);
      else if (d < -kPi) offset -= kTwoPi * std::round(d / kTwoPi);
    }
    ph[i] = raw + offset;
  }
  return ph;
}

std::vector<double> measured_group_delay(std::span<const double> b, std::span<const double> a,
                                         std::span<const double> omegas) {
  const std::size_t n = omegas.size();
  std::vector<double> gd(n, 0.0);
  if (n < 2) return gd;
  const auto ph = unwrapped_phase(frequency_response(b, a, omegas));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    gd[i] = -(ph[hi] - ph[lo]) / (omegas[hi] - omegas[lo]);
  }
  return gd;
}

bool ConstraintReport::pass() const {
  if (residual > residual_bound) return false;
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.pass; });
}

std::vector<std::string> ConstraintReport::violations() const {
  std::vector<std::string> out;
  if (residual > residual_bound) {
    std::ostringstream os;
    os << "residual " << residual << " exceeds " << residual_bound;
    out.push_back(os.str());
  }
  for (const auto& c : checks) {
    if (c.pass) continue;
    std::ostringstream os;
    os << "omega=" << c.omega << " k_omega=" << c.k_omega << " k_t=" << c.k_t << " analytic_err=" << c.analytic_error
       << " fd_err=" << c.fd_error;
    out.push_back(os.str());
  }
  return out;
}

namespace {

constexpr double kFdStep = 1.0e-3;
constexpr double kFdTol = 1.0e-4;

// Fourth-order central stencils for derivatives 0..3.
Complex fd_derivative(const PoleSet& poles, const CVector& c, double w, int k) {
  const double h = kFdStep;
  auto f = [&](double x) { return basis_sum_response(poles, c, x); };
  switch (k) {
    case 0: return f(w);
    case 1: return (-f(w + 2 * h) + 8.0 * f(w + h) - 8.0 * f(w - h) + f(w - 2 * h)) / (12.0 * h);
    case 2:
      return (-f(w + 2 * h) + 16.0 * f(w + h) - 30.0 * f(w) + 16.0 * f(w - h) - f(w - 2 * h)) / (12.0 * h * h);
    case 3:
      return (-f(w + 3 * h) + 8.0 * f(w + 2 * h) - 13.0 * f(w + h) + 13.0 * f(w - h) - 8.0 * f(w - 2 * h) +
              f(w - 3 * h)) /
             (8.0 * h * h * h);
    default: return {0.0, 0.0};
  }
}

}  // namespace

ConstraintReport verify_constraints(const FilterbankDesign& design) {
  const auto& spec = design.spec;
  const auto sys = assemble_system(spec, design.poles, design.delays);
  ConstraintReport rep;
  rep.residual = (sys.psi * design.C - sys.D).cwiseAbs().rowwise().sum().maxCoeff();
  const double d_norm = sys.D.cwiseAbs().rowwise().sum().maxCoeff();
  rep.residual_bound = 1e-8 * (1.0 + d_norm);

  // Scale of each derivative row, used so that zero targets are judged
  // against the size of the terms being cancelled.
  int row = 0;
  for (const auto& blk : sys.blocks) {
    for (int kw = 0; kw < blk.count; ++kw, ++row) {
      for (int kt = 0; kt < design.outputs(); ++kt) {
        ConstraintCheck ch;
        ch.omega = blk.omega;
        ch.k_omega = kw;
        ch.k_t = kt;
        ch.target = sys.D(row, kt);
        ch.analytic = (sys.psi.row(row) * design.C.col(kt))(0);
        const double col_scale =
            (sys.psi.row(row).cwiseAbs().transpose().cwiseProduct(design.C.col(kt).cwiseAbs())).maxCoeff();
        const double scale = std::max({std::abs(ch.target), col_scale, 1e-300});
        ch.analytic_error = std::abs(ch.analytic - ch.target) / scale;
        ch.pass = ch.analytic_error <= 1e-8;
        if (kw <= 3) {
          ch.has_fd = true;
          ch.finite_difference = fd_derivative(design.poles, design.C.col(kt), blk.omega, kw);
          ch.fd_error = std::abs(ch.finite_difference - ch.target) / scale;
          ch.pass = ch.pass && ch.fd_error <= kFdTol;
        }
        rep.checks.push_back(ch);
      }
    }
  }
  return rep;
}

double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

OrbitError orbit_steady_state(std::span<const double> b0, std::span<const double> a, double f_orb, double r_orb,
                              double q) {
  if (!(f_orb >= 0.0 && f_orb < 0.5)) throw ValidationError("0 <= f_orb < 0.5 violated");
  const double w = kTwoPi * f_orb;
  const Complex h = frequency_response(b0, a, w);
  return {(std::abs(h) - 1.0) * r_orb, wrap_angle(std::arg(h) + q * w)};
}

double impulse_energy(std::span<const double> b, std::span<const double> a, double tail, std::size_t max_samples) {
  const std::size_t K = a.size() - 1;
  // Streaming difference equation to avoid allocating max_samples up front.
  std::vector<double> xs(b.size(), 0.0), ys(a.size(), 0.0);
  double energy = 0.0;
  std::size_t quiet = 0;
  for (std::size_t n = 0; n < max_samples; ++n) {
    for (std::size_t k = xs.size(); k-- > 1;) xs[k] = xs[k - 1];
    if (!xs.empty()) xs[0] = n == 0 ? 1.0 : 0.0;
    double y = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) y += b[k] * xs[k];
    for (std::size_t k = 1; k < a.size(); ++k) y -= a[k] * ys[k - 1];
    for (std::size_t k = ys.size(); k-- > 1;) ys[k] = ys[k - 1];
    ys[0] = y;
    energy += y * y;
    quiet = std::abs(y) < tail ? quiet + 1 : 0;
    if (n > b.size() && quiet > K + 1) break;
  }
  return energy;
}

double parseval_energy(std::span<const double> b, std::span<const double> a, std::size_t points) {
  // Periodic trapezoid on [0, 2pi) is the plain mean.
  double acc = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = kTwoPi * static_cast<double>(i) / static_cast<double>(points);
    acc += std::norm(frequency_response(b, a, w));
  }
  return acc / static_cast<double>(points);
}

}  // namespace maxflat
