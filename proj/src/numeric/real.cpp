#include "critval/numeric/real.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace critval::num {

namespace {
thread_local mpfr_prec_t g_working_bits = 256;
constexpr mpfr_rnd_t kRnd = MPFR_RNDN;
}  // namespace

mpfr_prec_t working_bits() { return g_working_bits; }

void set_working_bits(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN) bits = MPFR_PREC_MIN;
  g_working_bits = bits;
}

mpfr_prec_t digits_to_bits(int digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 4;
}

int bits_to_digits(mpfr_prec_t bits) {
  return static_cast<int>(std::floor(static_cast<double>(bits) * 0.30102999566398120));
}

PrecisionScope::PrecisionScope(int decimal_digits) : saved_(g_working_bits) {
  set_working_bits(digits_to_bits(decimal_digits));
}

PrecisionScope::PrecisionScope(Bits, mpfr_prec_t bits) : saved_(g_working_bits) {
  set_working_bits(bits);
}

PrecisionScope PrecisionScope::bits(mpfr_prec_t bits) { return PrecisionScope(Bits{}, bits); }

PrecisionScope::~PrecisionScope() { g_working_bits = saved_; }

Real::Real() {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(int v) {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_si(value_, v, kRnd);
}

Real::Real(long v) {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_si(value_, v, kRnd);
}

Real::Real(double v) {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_d(value_, v, kRnd);
}

Real::Real(const mpz_class& v) {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_z(value_, v.get_mpz_t(), kRnd);
}

Real::Real(const mpq_class& v) {
  mpfr_init2(value_, g_working_bits);
  mpfr_set_q(value_, v.get_mpq_t(), kRnd);
}

Real::Real(std::string_view text) {
  mpfr_init2(value_, g_working_bits);
  std::string s(text);
  if (mpfr_set_str(value_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(value_);
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  }
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.bits());
  mpfr_set(value_, other.value_, kRnd);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (bits() != other.bits()) mpfr_set_prec(value_, other.bits());
    mpfr_set(value_, other.value_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::with_bits(mpfr_prec_t bits) {
  PrecisionScope scope = PrecisionScope::bits(bits);
  return Real();
}

void Real::round_to(mpfr_prec_t bits) { mpfr_prec_round(value_, bits, kRnd); }

Real& Real::operator+=(const Real& o) {
  mpfr_add(value_, value_, o.value_, kRnd);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  mpfr_sub(value_, value_, o.value_, kRnd);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  mpfr_mul(value_, value_, o.value_, kRnd);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  mpfr_div(value_, value_, o.value_, kRnd);
  return *this;
}
Real& Real::operator*=(long o) {
  mpfr_mul_si(value_, value_, o, kRnd);
  return *this;
}
Real& Real::operator/=(long o) {
  mpfr_div_si(value_, value_, o, kRnd);
  return *this;
}

Real operator+(const Real& a, const Real& b) {
  Real r;
  mpfr_add(r.value_, a.value_, b.value_, kRnd);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r;
  mpfr_sub(r.value_, a.value_, b.value_, kRnd);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r;
  mpfr_mul(r.value_, a.value_, b.value_, kRnd);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r;
  mpfr_div(r.value_, a.value_, b.value_, kRnd);
  return r;
}
Real operator*(const Real& a, long b) {
  Real r;
  mpfr_mul_si(r.value_, a.value_, b, kRnd);
  return r;
}
Real operator*(long a, const Real& b) { return b * a; }
Real operator/(const Real& a, long b) {
  Real r;
  mpfr_div_si(r.value_, a.value_, b, kRnd);
  return r;
}
Real Real::operator-() const {
  Real r;
  mpfr_neg(r.value_, value_, kRnd);
  return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

double Real::log10_abs() const {
  if (mpfr_zero_p(value_)) return -INFINITY;
  if (!mpfr_number_p(value_)) return INFINITY;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, value_, kRnd);
  return std::log10(std::fabs(m)) + static_cast<double>(e) * 0.30102999566398120;
}

std::string Real::to_string(int digits) const {
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  mpfr_asprintf(&buf, fmt.c_str(), value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string Real::to_string() const { return to_string(bits_to_digits(bits()) + 1); }

#define CRITVAL_UNARY(name, fn)   \
  Real name(const Real& x) {      \
    Real r;                       \
    fn(r.raw(), x.raw(), kRnd);   \
    return r;                     \
  }

CRITVAL_UNARY(abs, mpfr_abs)
CRITVAL_UNARY(sqrt, mpfr_sqrt)
CRITVAL_UNARY(exp, mpfr_exp)
CRITVAL_UNARY(log, mpfr_log)
CRITVAL_UNARY(sin, mpfr_sin)
CRITVAL_UNARY(cos, mpfr_cos)
CRITVAL_UNARY(erfc, mpfr_erfc)
CRITVAL_UNARY(gamma, mpfr_gamma)
#undef CRITVAL_UNARY

Real lngamma(const Real& x) {
  Real r;
  int sign = 0;
  mpfr_lgamma(r.raw(), &sign, x.raw(), kRnd);
  return r;
}

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real round(const Real& x) {
  Real r;
  mpfr_round(r.raw(), x.raw());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.raw(), y.raw(), x.raw(), kRnd);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, kRnd);
  return r;
}

Real gamma_inc(const Real& a, const Real& x) {
  Real r;
  mpfr_gamma_inc(r.raw(), a.raw(), x.raw(), kRnd);
  return r;
}

Real zeta(unsigned long n) {
  Real r;
  mpfr_zeta_ui(r.raw(), n, kRnd);
  return r;
}

Real const_pi() {
  Real r;
  mpfr_const_pi(r.raw(), kRnd);
  return r;
}

Real const_euler() {
  Real r;
  mpfr_const_euler(r.raw(), kRnd);
  return r;
}

Real const_log2() {
  Real r;
  mpfr_const_log2(r.raw(), kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Real pow10(long e) {
  Real r;
  mpfr_ui_pow_ui(r.raw(), 10, static_cast<unsigned long>(e < 0 ? -e : e), kRnd);
  if (e < 0) mpfr_ui_div(r.raw(), 1, r.raw(), kRnd);
  return r;
}

mpz_class to_mpz_rounded(const Real& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.raw(), MPFR_RNDN);
  return z;
}

}  // namespace critval::num
