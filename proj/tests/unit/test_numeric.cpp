#include "catch_amalgamated.hpp"

#include "critval/numeric/complex.hpp"
#include "critval/numeric/series.hpp"

#include <mpfr.h>

using namespace critval::num;

namespace {

// Γ(x) straight from MPFR at `bits`.
Real mpfr_gamma_of(const Real& x, mpfr_prec_t bits) {
  Real out = Real::with_bits(bits);
  mpfr_gamma(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

double rel_err(const Complex& a, const Complex& b) {
  Real d = abs(a - b);
  if (d.is_zero()) return -1000;
  return (d / abs(b)).log10_abs();
}

}  // namespace

TEST_CASE("precision scope restores the previous precision") {
  mpfr_prec_t before = working_bits();
  {
    PrecisionScope s(100);
    REQUIRE(working_bits() >= digits_to_bits(100));
  }
  REQUIRE(working_bits() == before);
}

TEST_CASE("decimal parsing round-trips at 60 digits") {
  PrecisionScope s(60);
  Real x(std::string_view("3.14159265358979323846264338327950288419716939937510582097494"));
  Real d = abs(x - const_pi());
  REQUIRE(d.log10_abs() < -58);
  REQUIRE_THROWS_AS(Real(std::string_view("3.1x")), std::invalid_argument);
}

TEST_CASE("complex gamma obeys reflection and recurrence") {
  PrecisionScope s(60);
  Complex z(Real(std::string_view("0.3")), Real(std::string_view("1.7")));
  Complex lhs = gamma(z) * gamma(Complex(1) - z);
  Complex rhs = Complex(const_pi()) / sin(Complex(const_pi()) * z);
  REQUIRE(rel_err(lhs, rhs) < -55);
  REQUIRE(rel_err(gamma(z + Complex(1)), z * gamma(z)) < -55);
  Complex w(Real(40), Real(-25));
  REQUIRE(rel_err(exp(lngamma(w + Complex(1)) - lngamma(w)), w) < -50);
}

TEST_CASE("complex gamma on the real axis matches MPFR") {
  PrecisionScope s(60);
  for (const char* x : {"0.5", "2.25", "7.5", "-2.5", "31.125"}) {
    Real r{std::string_view(x)};
    REQUIRE(rel_err(gamma(Complex(r)), Complex(mpfr_gamma_of(r, working_bits()))) < -55);
  }
}

TEST_CASE("upper incomplete gamma matches its defining integral at small argument") {
  // Γ(a, x) = Γ(a) − Σ_k (−1)^k x^{a+k} / (k! (a+k)) for small x.
  PrecisionScope s(50);
  Real a(std::string_view("2.5")), x(std::string_view("0.25"));
  Real lower = 0, term = 1;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) term = -term / k;  // (−1)^k / k!
    lower += term * pow(x, a + Real(k)) / (a + Real(k));
  }
  Real want = mpfr_gamma_of(a, working_bits()) - lower;
  REQUIRE(((gamma_inc(a, x) - want) / want).log10_abs() < -45);
}

TEST_CASE("Laurent expansion of gamma at half-integers") {
  PrecisionScope s(60);
  const std::size_t len = 40;
  Real delta(std::string_view("0.01"));
  for (long twice : {1L, 4L, -3L, 0L, -2L, -7L}) {
    Laurent L = gamma_laurent(twice, len);
    Real sum = 0, p = 1;
    for (std::size_t i = 0; i < L.c.size(); ++i) {
      sum += L.c[i] * p;
      p *= delta;
    }
    sum *= pow(delta, static_cast<long>(L.val));
    Real x = Real(mpq_class(twice, 2)) + delta;
    Real want = mpfr_gamma_of(x, working_bits());
    INFO("twice x0 = " << twice);
    REQUIRE(((sum - want) / want).log10_abs() < -50);
    REQUIRE(L.val == ((twice <= 0 && twice % 2 == 0) ? -1 : 0));
  }
}

TEST_CASE("power series exp and inverse") {
  PrecisionScope s(50);
  Series a{Real(0), Real(1)};
  Series e = series_exp(a, 12);
  Real f = 1;
  for (int i = 0; i < 12; ++i) {
    if (i > 0) f *= i;
    REQUIRE(abs(e[i] * f - Real(1)).log10_abs() < -45);
  }
  Series one_minus{Real(1), Real(-1)};
  Series inv = series_inv(one_minus, 10);
  for (const auto& c : inv) REQUIRE(abs(c - Real(1)).log10_abs() < -45);
}

TEST_CASE("roots of integer polynomials") {
  PrecisionScope s(50);
  // x^2 - x - 36036 has roots (1 ± √144145)/2
  auto r = poly_roots({mpz_class(-36036), mpz_class(-1), mpz_class(1)});
  REQUIRE(r.size() == 2);
  for (const auto& z : r) {
    Complex v = z * z - z - Complex(36036);
    REQUIRE(abs(v).log10_abs() < -40);
  }
}
