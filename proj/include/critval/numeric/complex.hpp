#pragma once

#include "critval/numeric/real.hpp"

#include <string>
#include <vector>

namespace critval::num {

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(const Real& r) : re(r) {}  // NOLINT(google-explicit-constructor)
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(int r) : re(r) {}     // NOLINT(google-explicit-constructor)
  Complex(long r) : re(r) {}    // NOLINT(google-explicit-constructor)
  Complex(double r) : re(r) {}  // NOLINT(google-explicit-constructor)
  Complex(double r, double i) : re(r), im(i) {}

  static Complex i();
  /// exp(i·theta).
  static Complex unit(const Real& theta);
  /// exp(2πi·k/m).
  static Complex root_of_unity(long k, long m);

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex& operator/=(const Real& o);

  Complex operator-() const { return {-re, -im}; }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  /// Rounds both parts to `bits`.
  void round_to(mpfr_prec_t bits);
  std::string to_string(int digits) const;
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator*(const Complex& a, long b);
Complex operator/(const Complex& a, long b);

Complex conj(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long n);
Complex pow(const Complex& z, const Complex& w);
/// x^w for real x > 0.
Complex pow(const Real& x, const Complex& w);
Complex sin(const Complex& z);

/// A logarithm of Γ(z) (branch not normalized; exp of it is Γ(z)).
Complex lngamma(const Complex& z);
Complex gamma(const Complex& z);

/// Exact Bernoulli number B_n (cached, thread-safe).
const mpq_class& bernoulli(int n);

/// Horner evaluation, coefficients constant-first.
Complex poly_eval(const std::vector<Complex>& coeffs, const Complex& z);

/// All complex roots of a polynomial with integer coefficients
/// (constant-first), polished to working precision, sorted by
/// (real part, imaginary part).
std::vector<Complex> poly_roots(const std::vector<mpz_class>& coeffs);

}  // namespace critval::num
