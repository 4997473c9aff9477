#include "maxflat/poly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "maxflat/error.hpp"

namespace maxflat {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    coeffs_.push_back(0.0);
    return;
  }
  // Exact zeros in front carry no information.
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(),
                            [](Complex c) { return c != Complex{0.0}; });
  if (first == coeffs_.end()) {
    coeffs_.assign(1, 0.0);
  } else {
    coeffs_.erase(coeffs_.begin(), first);
  }
}

Polynomial Polynomial::from_real(std::span<const double> coeffs) {
  return Polynomial(std::vector<Complex>(coeffs.begin(), coeffs.end()));
}

bool Polynomial::is_zero() const {
  return coeffs_.size() == 1 && coeffs_[0] == Complex{0.0};
}

Complex Polynomial::operator()(Complex z) const { return poly_eval(*this, z); }

Polynomial Polynomial::derivative() const {
  const int n = degree();
  if (n <= 0) return Polynomial{};
  std::vector<Complex> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = coeffs_[static_cast<std::size_t>(i)] * static_cast<double>(n - i);
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::stripped(double rel_tol) const {
  double scale = 0.0;
  for (auto c : coeffs_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return Polynomial{};
  std::size_t lead = 0;
  while (lead + 1 < coeffs_.size() && std::abs(coeffs_[lead]) < rel_tol * scale) ++lead;
  return Polynomial(std::vector<Complex>(coeffs_.begin() + static_cast<std::ptrdiff_t>(lead), coeffs_.end()));
}

std::vector<double> Polynomial::real_coeffs(double tol) const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (auto c : coeffs_) {
    if (std::abs(c.imag()) > tol) {
      throw NumericalError("polynomial coefficient has imaginary residue " +
                           std::to_string(c.imag()) + " where a real value was expected");
    }
    out.push_back(c.real());
  }
  return out;
}

Polynomial poly_from_roots(std::span<const Complex> roots) {
  std::vector<Complex> c{1.0};
  c.reserve(roots.size() + 1);
  for (auto r : roots) {
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  return Polynomial(std::move(c));
}

std::vector<Complex> poly_roots(const Polynomial& p) {
  const Polynomial s = p.stripped();
  const int n = s.degree();
  if (n < 1) throw ValidationError("no roots: polynomial has degree 0");
  const auto& c = s.coeffs();
  CMatrix companion = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Polynomial poly_mul(const Polynomial& p, const Polynomial& q) {
  const auto& a = p.coeffs();
  const auto& b = q.coeffs();
  std::vector<Complex> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return Polynomial(std::move(c));
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) {
  const auto& a = p.coeffs();
  const auto& b = q.coeffs();
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<Complex> c(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) c[n - a.size() + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[n - b.size() + i] += b[i];
  return Polynomial(std::move(c));
}

Polynomial poly_scale(const Polynomial& p, Complex s) {
  std::vector<Complex> c = p.coeffs();
  for (auto& v : c) v *= s;
  return Polynomial(std::move(c));
}

Complex poly_eval(const Polynomial& p, Complex z) {
  Complex acc{0.0};
  for (auto c : p.coeffs()) acc = acc * z + c;
  return acc;
}

}  // namespace maxflat
