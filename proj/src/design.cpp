#include "maxflat/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "maxflat/error.hpp"

namespace maxflat {

namespace {

constexpr double kIllConditioned = 1.0e12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Imaginary residue is judged against the magnitude of the largest entry so
// that differentiator outputs (which scale with Ts^-k_t) are not rejected for
// rounding noise.
template <typename Derived>
void require_real(const Eigen::MatrixBase<Derived>& m, const char* what) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) scale = std::max(scale, std::abs(m(i)));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (std::abs(m(i).imag()) > kComplexTol * scale) {
      std::ostringstream os;
      os << what << ": imaginary residue " << m(i).imag() << " exceeds tolerance";
      throw NumericalError(os.str());
    }
  }
}

std::vector<double> real_vector(const std::vector<Complex>& v, const char* what) {
  Eigen::Map<const CVector> m(v.data(), static_cast<Eigen::Index>(v.size()));
  require_real(m, what);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double inf_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

void DesignSpec::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError(what + " violated"); };
  if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) fail("F_s > 0");
  if (!(f_wb > 0.0 && f_wb < 0.5)) fail("0 < f_wb < 0.5");
  if (k_w_dc < 0 || k_w_nb < 0 || k_w_pi < 0) fail("non-negative constraint counts");
  if (k_t < 1) fail("K_t >= 1");
  if (k_w_dc < k_t) fail("K_w_dc >= K_t");
  if (order() < 1) fail("K >= 1");
  if (!(bandwidth_factor > 0.0)) fail("bandwidth factor > 0");
  if (f_nb) {
    if (!(*f_nb > 0.0 && *f_nb < 0.5)) fail("0 < f_nb < 0.5");
    if (!(*f_nb > f_wb)) fail("F_nb > F_wb");
  }
  if (k_w_nb > 0 && !f_nb) fail("f_nb given when K_w_nb > 0");
  if (group_delay && !std::isfinite(*group_delay)) fail("finite group delay");
  if (!causal) {
    if (order() % 2 != 0) fail("even constraint count for non-causal design");
    if (group_delay && *group_delay != 0.0) fail("zero group delay for non-causal design");
  }
}

Eigen::MatrixXd alpha_table(int K) {
  if (K < 1) throw ValidationError("alpha table size must be >= 1");
  Eigen::MatrixXd al = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l <= k; ++l) {
      if (l == 0) {
        al(k, l) = 1.0;
      } else if (l == k) {
        al(k, l) = factorial(l);
      } else {
        al(k, l) = l * al(k - 1, l - 1) + (l + 1) * al(k - 1, l);
      }
    }
  }
  return al;
}

CVector basis_derivative_column(Complex p, double omega_d, int K) {
  const Complex z = std::polar(1.0, omega_d);
  const Complex den = z - p;
  if (std::abs(den) < 1e-14) throw NumericalError("singular basis evaluation: pole on evaluation point");
  const Complex psi = z / den;
  const auto al = alpha_table(K);
  CVector col(K);
  for (int k = 0; k < K; ++k) {
    Complex sum{0.0};
    Complex psi_pow = psi;
    for (int l = 0; l <= k; ++l) {
      sum += (l % 2 == 0 ? 1.0 : -1.0) * al(k, l) * psi_pow;
      psi_pow *= psi;
    }
    col(k) = ipow(k) * sum;
  }
  return col;
}

CVector dc_targets(double q, double Ts, int k_w_dc, int k_t) {
  CVector d = CVector::Zero(k_w_dc);
  for (int k = k_t; k < k_w_dc; ++k) {
    d(k) = ipow(k) * std::pow(-q, k - k_t) * std::pow(1.0 / Ts, k_t) * factorial(k) / factorial(k - k_t);
  }
  return d;
}

ConstraintSystem assemble_system(const DesignSpec& spec, const PoleSet& poles,
                                 std::span<const double> delays) {
  const int K = spec.order();
  if (static_cast<int>(poles.size()) != K) {
    throw ValidationError("pole count " + std::to_string(poles.size()) + " does not match constraint count " +
                          std::to_string(K));
  }
  if (static_cast<int>(delays.size()) != spec.k_t) throw ValidationError("one delay per output required");

  ConstraintSystem sys;
  sys.blocks = {{0.0, spec.k_w_dc},
                {-spec.omega_nb(), spec.k_w_nb},
                {+spec.omega_nb(), spec.k_w_nb},
                {kPi, spec.k_w_pi}};
  sys.psi = CMatrix::Zero(K, K);
  int row = 0;
  for (const auto& blk : sys.blocks) {
    if (blk.count == 0) continue;
    for (int k = 0; k < K; ++k) {
      sys.psi.block(row, k, blk.count, 1) = basis_derivative_column(poles.poles[static_cast<std::size_t>(k)],
                                                                    blk.omega, blk.count);
    }
    row += blk.count;
  }
  sys.D = CMatrix::Zero(K, spec.k_t);
  for (int kt = 0; kt < spec.k_t; ++kt) {
    sys.D.block(0, kt, spec.k_w_dc, 1) = dc_targets(delays[static_cast<std::size_t>(kt)], spec.Ts(), spec.k_w_dc, kt);
  }
  sys.condition = condition_number(sys.psi);
  if (!std::isfinite(sys.condition) || sys.condition > kIllConditioned) {
    std::ostringstream os;
    os << "ill-conditioned constraint system (condition " << sys.condition << ")";
    sys.warnings.push_back(os.str());
  }
  return sys;
}

CMatrix gram_matrix(const PoleSet& poles) {
  const auto K = static_cast<Eigen::Index>(poles.size());
  for (auto p : poles.poles) {
    if (std::abs(p) >= 1.0) throw ValidationError("Gram matrix undefined for non-causal basis");
  }
  CMatrix S(K, K);
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b)
      S(a, b) = 1.0 / (1.0 - std::conj(poles.poles[static_cast<std::size_t>(a)]) *
                                 poles.poles[static_cast<std::size_t>(b)]);
  return S;
}

CMatrix two_sided_gram_matrix(const PoleSet& poles) {
  const auto K = static_cast<Eigen::Index>(poles.size());
  CMatrix S = CMatrix::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    const Complex pa = poles.poles[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < K; ++b) {
      const Complex pb = poles.poles[static_cast<std::size_t>(b)];
      const bool ia = std::abs(pa) < 1.0;
      const bool ib = std::abs(pb) < 1.0;
      if (ia && ib) {
        S(a, b) = 1.0 / (1.0 - std::conj(pa) * pb);
      } else if (!ia && !ib) {
        const Complex r = 1.0 / (std::conj(pa) * pb);
        S(a, b) = r / (1.0 - r);
      }
    }
  }
  return S;
}

CMatrix solve_coefficients(const ConstraintSystem& system) {
  Eigen::FullPivLU<CMatrix> lu(system.psi);
  if (!lu.isInvertible() || lu.rcond() < 1e-15) {
    throw NumericalError("degenerate constraint set: constraint matrix is numerically singular");
  }
  CMatrix C = lu.solve(system.D);
  // One step of iterative refinement recovers digits lost to row scaling.
  C += lu.solve(system.D - system.psi * C);
  return C;
}

RMatrix white_noise_gain(const CMatrix& C, const CMatrix& S) {
  if (S.rows() != C.rows() || S.cols() != C.rows()) throw ValidationError("white_noise_gain: dimension mismatch");
  const CMatrix M = C.adjoint() * S * C;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double scale = std::max(1.0, std::sqrt(std::abs(M(i, i)) * std::abs(M(j, j))));
      if (std::abs(M(i, j).imag()) > kComplexTol * scale) {
        throw NumericalError("non-real WNG - design inconsistency");
      }
    }
  }
  return M.real();
}

WngPolynomial wng_polynomial(const DesignSpec& spec, const PoleSet& poles, const CMatrix& S, int k_t) {
  if (k_t < 0 || k_t >= spec.k_w_dc) throw ValidationError("wng_polynomial requires 0 <= k_t < K_w_dc");
  const std::vector<double> zero_delays(static_cast<std::size_t>(spec.k_t), 0.0);
  const auto sys = assemble_system(spec, poles, zero_delays);
  const int K = spec.order();
  Eigen::FullPivLU<CMatrix> lu(sys.psi);
  if (!lu.isInvertible()) throw NumericalError("degenerate constraint set: constraint matrix is numerically singular");
  const CMatrix phi = lu.solve(CMatrix::Identity(K, K));
  const CMatrix phi_dc = phi.leftCols(spec.k_w_dc);
  const CMatrix J = phi_dc.adjoint() * S * phi_dc;

  // d_k(q) = delta_k q^(k - k_t) for k >= k_t.
  const int n = spec.k_w_dc - k_t;
  std::vector<Complex> delta(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int k = j + k_t;
    delta[static_cast<std::size_t>(j)] = ipow(k) * ((k - k_t) % 2 == 0 ? 1.0 : -1.0) *
                                         std::pow(1.0 / spec.Ts(), k_t) * factorial(k) / factorial(k - k_t);
  }
  std::vector<Complex> ascending(static_cast<std::size_t>(2 * n - 1), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      ascending[static_cast<std::size_t>(a + b)] += std::conj(delta[static_cast<std::size_t>(a)]) *
                                                    J(a + k_t, b + k_t) * delta[static_cast<std::size_t>(b)];
  const auto real_asc = real_vector(ascending, "white-noise gain polynomial");
  std::vector<Complex> desc(real_asc.rbegin(), real_asc.rend());
  WngPolynomial out;
  out.sigma = Polynomial(std::move(desc));
  out.derivative = out.sigma.derivative();
  return out;
}

OptimalDelay optimal_group_delay(const DesignSpec& spec, const PoleSet& poles, const CMatrix& S, int k_t) {
  const auto wp = wng_polynomial(spec, poles, S, k_t);
  double sigma_scale = 0.0;
  for (auto c : wp.sigma.coeffs()) sigma_scale = std::max(sigma_scale, std::abs(c));
  double d_scale = 0.0;
  for (auto c : wp.derivative.coeffs()) d_scale = std::max(d_scale, std::abs(c));
  if (wp.derivative.degree() < 1 || d_scale <= 1e-13 * sigma_scale) {
    return {0.0, poly_eval(wp.sigma, 0.0).real(), true};
  }
  const auto roots = poly_roots(wp.derivative);
  auto residue = [](Complex r) { return std::abs(r.imag()) / std::max(1.0, std::abs(r)); };
  std::vector<double> real_roots;
  for (auto r : roots)
    if (residue(r) < kComplexTol) real_roots.push_back(r.real());
  if (real_roots.empty() && wp.derivative.degree() % 2 == 1) {
    // An odd-degree real polynomial has a real root; take the least complex one.
    const auto it = std::min_element(roots.begin(), roots.end(),
                                     [&](Complex x, Complex y) { return residue(x) < residue(y); });
    real_roots.push_back(it->real());
  }
  if (real_roots.empty()) throw NumericalError("white-noise gain polynomial has no real stationary point");
  const auto second = wp.derivative.derivative();
  for (double& q : real_roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = poly_eval(wp.derivative, q).real();
      const double df = poly_eval(second, q).real();
      if (df == 0.0) break;
      const double next = q - f / df;
      if (!std::isfinite(next) || std::abs(poly_eval(wp.derivative, next)) >= std::abs(f)) break;
      q = next;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (double q : real_roots) best = std::min(best, poly_eval(wp.sigma, q).real());
  OptimalDelay out{std::numeric_limits<double>::infinity(), best, false};
  for (double q : real_roots)
    if (std::abs(poly_eval(wp.sigma, q).real() - best) < kWngTieTol) out.q = std::min(out.q, q);
  return out;
}

RealTransfer transfer_coefficients(const CVector& c, const PoleSet& poles) {
  const auto K = poles.size();
  if (static_cast<std::size_t>(c.size()) != K) throw ValidationError("coefficient count must match pole count");
  const auto A = poly_from_roots(poles.poles);
  std::vector<Complex> b(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    // c_k z prod_{j != k} (z - p_j)
    std::vector<Complex> term{c(static_cast<Eigen::Index>(k)), 0.0};
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      term.push_back(0.0);
      for (std::size_t i = term.size() - 1; i > 0; --i) term[i] -= poles.poles[j] * term[i - 1];
    }
    for (std::size_t i = 0; i < term.size(); ++i) b[i] += term[i];
  }
  RealTransfer out;
  out.a = real_vector(A.coeffs(), "denominator");
  out.b = real_vector(b, "numerator");
  out.a[0] = 1.0;
  out.b[K] = 0.0;
  return out;
}

Complex basis_sum_response(const PoleSet& poles, const CVector& c, double omega) {
  const Complex z = std::polar(1.0, omega);
  Complex h{0.0};
  for (std::size_t k = 0; k < poles.size(); ++k) h += c(static_cast<Eigen::Index>(k)) * z / (z - poles.poles[k]);
  return h;
}

namespace {

void fill_transfer(FilterbankDesign& d) {
  d.b.clear();
  for (int kt = 0; kt < d.outputs(); ++kt) {
    auto tf = transfer_coefficients(d.C.col(kt), d.poles);
    d.a = std::move(tf.a);
    d.b.push_back(std::move(tf.b));
  }
  if (d.outputs() == 0) d.a = transfer_coefficients(CVector::Zero(d.order()), d.poles).a;
}

}  // namespace

FilterbankDesign design_filterbank(const DesignSpec& spec) {
  spec.validate();
  if (!spec.causal) throw ValidationError("design_filterbank requires a causal spec; use noncausal_design");
  const int K = spec.order();

  FilterbankDesign d;
  d.spec = spec;
  d.Ts = spec.Ts();
  d.poles = causal_z_poles(K, spec.cutoff_rad_per_sec(), spec.Ts(), spec.pole_mapping);
  const CMatrix S = gram_matrix(d.poles);

  d.delays.assign(static_cast<std::size_t>(spec.k_t), 0.0);
  if (spec.group_delay) {
    std::fill(d.delays.begin(), d.delays.end(), *spec.group_delay);
  } else {
    const auto q0 = optimal_group_delay(spec, d.poles, S, 0);
    std::fill(d.delays.begin(), d.delays.end(), q0.q);
    if (spec.per_output_delay) {
      for (int kt = 1; kt < spec.k_t; ++kt) {
        const auto qk = optimal_group_delay(spec, d.poles, S, kt);
        if (!qk.delay_independent) d.delays[static_cast<std::size_t>(kt)] = qk.q;
      }
    }
  }
  d.q = d.delays.front();

  const auto sys = assemble_system(spec, d.poles, d.delays);
  d.condition = sys.condition;
  d.warnings = sys.warnings;
  d.C = solve_coefficients(sys);
  d.residual = inf_norm(sys.psi * d.C - sys.D);
  d.sigma = white_noise_gain(d.C, S);
  fill_transfer(d);
  return d;
}

NoncausalDesign noncausal_design(const DesignSpec& spec_in) {
  DesignSpec spec = spec_in;
  spec.causal = false;
  spec.validate();
  spec.group_delay = 0.0;
  const int K = spec.order();

  NoncausalDesign nc;
  nc.spec = spec;
  nc.poles = full_z_poles(K / 2, spec.cutoff_rad_per_sec(), spec.Ts(), spec.pole_mapping);
  for (auto p : nc.poles.poles) {
    if (std::abs(std::abs(p) - 1.0) < 1e-12) throw NumericalError("marginal pole - cannot split");
  }
  const std::vector<double> delays(static_cast<std::size_t>(spec.k_t), 0.0);
  const auto sys = assemble_system(spec, nc.poles, delays);
  nc.condition = sys.condition;
  nc.C = solve_coefficients(sys);
  nc.residual = inf_norm(sys.psi * nc.C - sys.D);
  nc.sigma = white_noise_gain(nc.C, two_sided_gram_matrix(nc.poles));

  auto make_part = [&](bool inside) {
    FilterbankDesign part;
    part.spec = spec;
    part.Ts = spec.Ts();
    part.condition = nc.condition;
    part.residual = nc.residual;
    part.delays = delays;
    std::vector<Eigen::Index> idx;
    for (std::size_t k = 0; k < nc.poles.size(); ++k)
      if (nc.poles.inside(k) == inside) idx.push_back(static_cast<Eigen::Index>(k));
    part.C = CMatrix(static_cast<Eigen::Index>(idx.size()), spec.k_t);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Complex p = nc.poles.poles[static_cast<std::size_t>(idx[r])];
      if (inside) {
        part.poles.poles.push_back(p);
        part.C.row(static_cast<Eigen::Index>(r)) = nc.C.row(idx[r]);
      } else {
        const Complex rp = 1.0 / p;
        part.poles.poles.push_back(rp);
        part.C.row(static_cast<Eigen::Index>(r)) = -rp * nc.C.row(idx[r]);
      }
    }
    part.sigma = white_noise_gain(part.C, gram_matrix(part.poles));
    fill_transfer(part);
    return part;
  };
  nc.forward = make_part(true);
  nc.backward = make_part(false);
  return nc;
}

}  // namespace maxflat
