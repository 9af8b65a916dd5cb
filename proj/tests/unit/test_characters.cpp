#include "catch_amalgamated.hpp"

#include "../support/oracles.hpp"

#include "critval/characters/character.hpp"

using namespace critval;
using chars::DirichletCharacter;
using num::Complex;
using num::Real;

namespace {

long euler_phi(long n) {
  long r = n;
  for (long p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  if (n > 1) r -= r / n;
  return r;
}

// Σ χ(a) e^{2πi a/q} computed from the character's values only.
Complex direct_gauss(const DirichletCharacter& chi) {
  Complex g;
  for (long a = 1; a <= chi.modulus(); ++a)
    if (auto e = chi.exp(a)) g += Complex::root_of_unity(*e, chi.order()) * Complex::root_of_unity(a, chi.modulus());
  return g;
}

// The real primitive character of conductor |d|.
const DirichletCharacter* find_quadratic(const std::vector<DirichletCharacter>& all, long d) {
  for (const auto& c : all) {
    if (c.order() != 2 || !c.is_primitive()) continue;
    bool ok = true;
    for (long n = 1; n < 4 * c.modulus() && ok; ++n) {
      int want = oracle::kronecker(d, n);
      auto e = c.exp(n);
      int got = e ? (*e == 0 ? 1 : -1) : 0;
      ok = want == got;
    }
    if (ok) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("character groups have Euler phi elements with consistent structure") {
  for (long q : {1L, 2L, 5L, 8L, 12L, 13L, 16L, 45L, 60L, 97L}) {
    auto all = chars::enumerate_characters(q);
    REQUIRE(static_cast<long>(all.size()) == euler_phi(q));
    for (const auto& c : all) {
      REQUIRE(c.modulus() == q);
      REQUIRE(q % c.conductor() == 0);
      REQUIRE(DirichletCharacter::parse(c.label()) == c);
      // multiplicativity on units
      for (long a = 1; a < q; ++a)
        for (long b = 1; b < q; ++b) {
          auto ea = c.exp(a), eb = c.exp(b), eab = c.exp(a * b % q);
          if (ea && eb) REQUIRE(*eab == (*ea + *eb) % c.order());
        }
    }
    REQUIRE(chars::enumerate_characters(q, 1).size() + chars::enumerate_characters(q, -1).size() == all.size());
  }
}

TEST_CASE("labels") {
  REQUIRE(DirichletCharacter::parse("trivial").is_trivial());
  REQUIRE(DirichletCharacter::parse("7.triv").modulus() == 7);
  REQUIRE(DirichletCharacter::parse("7.triv").is_trivial());
  REQUIRE_THROWS(DirichletCharacter::parse("7.x"));
  REQUIRE_THROWS(DirichletCharacter::parse("7.999"));
  auto chi5 = DirichletCharacter::parse("5.2");
  REQUIRE(chi5.order() == 2);
  REQUIRE(chi5.is_even());
}

TEST_CASE("quadratic characters agree with the Kronecker symbol and have classical Gauss sums") {
  num::PrecisionScope s(50);
  for (long d : {5L, 8L, 12L, 13L, -3L, -4L, -7L, -8L, 21L, -20L}) {
    long q = d < 0 ? -d : d;
    auto all = chars::enumerate_characters(q);
    const DirichletCharacter* c = find_quadratic(all, d);
    INFO("d = " << d);
    REQUIRE(c != nullptr);
    REQUIRE(c->is_even() == (d > 0));
    Complex g = chars::gauss_sum(*c, 50);
    Complex want = d > 0 ? Complex(sqrt(Real(q))) : Complex(Real(0), sqrt(Real(q)));
    REQUIRE(abs(g - want).log10_abs() < -45);
  }
}

TEST_CASE("Gauss sums of primitive characters have modulus squared the conductor") {
  num::PrecisionScope s(50);
  for (long q = 3; q <= 40; ++q)
    for (const auto& c : chars::enumerate_characters(q)) {
      if (!c.is_primitive()) continue;
      Complex g = chars::gauss_sum(c, 50);
      REQUIRE(abs(norm(g) - Real(q)).log10_abs() < -45);
      REQUIRE(abs(g - direct_gauss(c)).log10_abs() < -45);
    }
}

TEST_CASE("primitivization and products") {
  num::PrecisionScope s(50);
  auto chi5 = DirichletCharacter::parse("5.2");
  // the character mod 15 induced from χ5
  const DirichletCharacter* induced = nullptr;
  auto all15 = chars::enumerate_characters(15);
  for (const auto& c : all15)
    if (c.conductor() == 5 && c.order() == 2) induced = &c;
  REQUIRE(induced != nullptr);
  REQUIRE(chars::primitivize(*induced) == chi5);

  // g(χ1 χ2) = χ1(q2) χ2(q1) g(χ1) g(χ2) for coprime conductors
  auto a = chars::enumerate_characters(7)[1];
  auto b = chars::enumerate_characters(9)[2];
  REQUIRE(a.is_primitive());
  REQUIRE(b.is_primitive());
  auto ab = chars::character_product(a, b);
  REQUIRE(ab.modulus() == 63);
  Complex lhs = direct_gauss(ab);
  Complex rhs = a.value(9) * b.value(7) * direct_gauss(a) * direct_gauss(b);
  REQUIRE(abs(lhs - rhs).log10_abs() < -40);
  REQUIRE(chars::gauss_sum_product_check(a, b, 50).log10_abs() < -40);
}
