#pragma once

// RAII wrapper around mpfr_t with a scoped, thread-local working precision.
//
// Every freshly constructed value (and every arithmetic result) is created at
// the current working precision.  Copies keep the precision of their source.

#include <mpfr.h>
#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>
#include <utility>

namespace critval::num {

/// Current working precision in bits.
mpfr_prec_t working_bits();
void set_working_bits(mpfr_prec_t bits);

/// Decimal digits <-> bits, rounded up.
mpfr_prec_t digits_to_bits(int digits);
int bits_to_digits(mpfr_prec_t bits);

/// Sets the working precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(int decimal_digits);
  static PrecisionScope bits(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  struct Bits {};
  PrecisionScope(Bits, mpfr_prec_t bits);
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real();
  Real(int v);     // NOLINT(google-explicit-constructor)
  Real(long v);    // NOLINT(google-explicit-constructor)
  Real(double v);  // NOLINT(google-explicit-constructor)
  explicit Real(const mpz_class& v);
  explicit Real(const mpq_class& v);
  /// Parses a decimal string; throws std::invalid_argument on junk.
  explicit Real(std::string_view text);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  static Real with_bits(mpfr_prec_t bits);

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }
  mpfr_prec_t bits() const { return mpfr_get_prec(value_); }
  /// Rounds to `bits`, changing the stored precision.
  void round_to(mpfr_prec_t bits);

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long o);
  Real& operator/=(long o);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator*(const Real& a, long b);
  friend Real operator*(long a, const Real& b);
  friend Real operator/(const Real& a, long b);
  Real operator-() const;

  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  long to_long_rounded() const { return mpfr_get_si(value_, MPFR_RNDN); }
  /// log10|x| as a double (-inf for zero); safe for huge exponents.
  double log10_abs() const;
  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits) const;
  /// Full-precision decimal string (enough digits to round-trip).
  std::string to_string() const;

 private:
  mpfr_t value_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real floor(const Real& x);
Real round(const Real& x);
Real erfc(const Real& x);
/// Upper incomplete gamma Γ(a, x).
Real gamma_inc(const Real& a, const Real& x);
Real lngamma(const Real& x);
Real gamma(const Real& x);
Real zeta(unsigned long n);
Real const_pi();
Real const_euler();
Real const_log2();
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
/// 10^e at working precision.
Real pow10(long e);

/// Nearest integer as mpz.
mpz_class to_mpz_rounded(const Real& x);

}  // namespace critval::num
