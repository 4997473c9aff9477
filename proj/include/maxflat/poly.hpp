#pragma once

#include <span>
#include <vector>

#include "maxflat/types.hpp"

namespace maxflat {

/// Complex polynomial stored with descending powers: coeffs()[0] multiplies
/// z^degree. The zero polynomial is stored as {0}.
class Polynomial {
 public:
  Polynomial() : coeffs_{Complex{0.0}} {}
  explicit Polynomial(std::vector<Complex> coeffs);

  static Polynomial from_real(std::span<const double> coeffs);

  [[nodiscard]] const std::vector<Complex>& coeffs() const { return coeffs_; }
  [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] Complex operator()(Complex z) const;

  [[nodiscard]] Polynomial derivative() const;
  /// Leading coefficients smaller than rel_tol * max|coeff| removed.
  [[nodiscard]] Polynomial stripped(double rel_tol = 1.0e-14) const;
  /// Real parts, after checking every imaginary part is within tol.
  /// Throws NumericalError otherwise.
  [[nodiscard]] std::vector<double> real_coeffs(double tol = kComplexTol) const;

 private:
  std::vector<Complex> coeffs_;
};

[[nodiscard]] Polynomial poly_from_roots(std::span<const Complex> roots);

/// All roots (with multiplicity) as eigenvalues of the companion matrix.
/// Near-zero leading coefficients are stripped first. Throws
/// ValidationError("no roots") for constant polynomials.
[[nodiscard]] std::vector<Complex> poly_roots(const Polynomial& p);

[[nodiscard]] Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
[[nodiscard]] Polynomial poly_add(const Polynomial& p, const Polynomial& q);
[[nodiscard]] Polynomial poly_scale(const Polynomial& p, Complex s);

/// Horner evaluation.
[[nodiscard]] Complex poly_eval(const Polynomial& p, Complex z);

}  // namespace maxflat
