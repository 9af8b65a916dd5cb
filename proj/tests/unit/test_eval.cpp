#include "catch_amalgamated.hpp"

#include "../support/oracles.hpp"

#include "critval/eval/lfunction.hpp"

#include <mpfr.h>

using namespace critval;
using arch::GammaAtom;
using num::Complex;
using num::PrecisionScope;
using num::Real;

namespace {

Real rd(const char* s) { return Real(std::string_view(s)); }

double rel(const Complex& a, const Complex& b) {
  Real d = abs(a - b);
  if (d.is_zero()) return -1000;
  Real m = abs(b);
  return (m.is_zero() ? d : d / m).log10_abs();
}

// Γ(a, x) through MPFR directly.
Real upper_gamma(const Real& a, const Real& x) {
  Real out = Real::with_bits(num::working_bits());
  mpfr_gamma_inc(out.raw(), a.raw(), x.raw(), MPFR_RNDN);
  return out;
}

// ζ(s) by Euler–Maclaurin with N terms and m Bernoulli corrections.
Complex zeta_em(const Complex& s, long N, int m) {
  // Bernoulli numbers B_0..B_{2m} from the defining recurrence.
  std::vector<mpq_class> B(2 * m + 1);
  B[0] = 1;
  for (int n = 1; n <= 2 * m; ++n) {
    mpq_class acc = 0;
    mpz_class binom = 1;  // C(n+1, k)
    for (int k = 0; k < n; ++k) {
      acc += mpq_class(binom) * B[k];
      binom = binom * (n + 1 - k) / (k + 1);
    }
    B[n] = -acc / (n + 1);
  }
  Complex sum;
  for (long n = 1; n < N; ++n) sum += pow(Real(n), -s);
  Complex Ns = pow(Real(N), -s);
  sum += Ns * Real(N) / (s - Complex(1)) + Ns / 2L;
  Complex rising = s;  // s(s+1)…(s+2j−2)
  Real fact = 2;       // (2j)!
  Complex Npow = Ns / Real(N);
  for (int j = 1; j <= m; ++j) {
    if (j > 1) {
      rising = rising * (s + Complex(2 * j - 3)) * (s + Complex(2 * j - 2));
      fact *= (2 * j - 1) * (2 * j);
      Npow = Npow / Real(N * N);
    }
    sum += Complex(Real(B[2 * j])) * rising * Npow / fact;
  }
  return sum;
}

mf::Newform delta(std::size_t M) { return mf::level_one_newforms(12, M)[0].members[0]; }

}  // namespace

TEST_CASE("single-atom kernels are incomplete gamma functions") {
  PrecisionScope scope(60);
  const int digits = 40;
  for (const char* sv : {"2.5", "0.75", "6"})
    for (const char* tv : {"0.3", "1", "2.5"}) {
      Real s = rd(sv), t = rd(tv), pi = num::const_pi();
      // Γ_R: π^{−s/2} Γ(s/2, π t²)
      Real want_r = pow(pi, -s / 2L) * upper_gamma(s / 2L, pi * t * t);
      // Γ_C: 2 (2π)^{−s} Γ(s, 2π t)
      Real want_c = Real(2) * pow(Real(2) * pi, -s) * upper_gamma(s, Real(2) * pi * t);
      std::vector<GammaAtom> ar{{GammaAtom::R, 0}}, ac{{GammaAtom::C, 0}};
      INFO("s = " << sv << ", t = " << tv);
      REQUIRE(rel(eval::mellin_kernel_residues(ar, t, Complex(s), digits), Complex(want_r)) < -digits + 2);
      REQUIRE(rel(eval::mellin_kernel_residues(ac, t, Complex(s), digits), Complex(want_c)) < -digits + 2);
      REQUIRE(rel(eval::mellin_kernel_quadrature(ar, t, Complex(s), digits), Complex(want_r)) < -digits + 2);
      REQUIRE(rel(eval::mellin_kernel_quadrature(ac, t, Complex(s), digits), Complex(want_c)) < -digits + 2);
    }
}

TEST_CASE("residue and quadrature kernels agree for products of atoms") {
  PrecisionScope scope(60);
  std::vector<GammaAtom> sym3{{GammaAtom::C, mpq_class(11, 2)}, {GammaAtom::C, mpq_class(33, 2)}};
  std::vector<GammaAtom> sym2{{GammaAtom::R, 1}, {GammaAtom::C, 11}};
  std::vector<GammaAtom> mixed{{GammaAtom::R, 0}, {GammaAtom::R, 1}, {GammaAtom::C, 1}};
  // R atoms off the C lattice are left to the line integral
  std::vector<GammaAtom> split{{GammaAtom::R, 0}, {GammaAtom::C, mpq_class(1, 2)}};
  Complex s(rd("0.8"), rd("1.3"));
  REQUIRE(eval::kernel_crossover_check(sym3, s, 30) < -25);
  REQUIRE(eval::kernel_crossover_check(sym2, s, 30) < -25);
  REQUIRE(eval::kernel_crossover_check(mixed, Complex(rd("1.5")), 30) < -25);
  REQUIRE_THROWS_AS(eval::mellin_kernel_residues(split, Real(1), Complex(rd("1.5")), 30), std::invalid_argument);
  // s on the pole lattice of γ: the 1/z pole merges with a gamma pole
  std::vector<GammaAtom> r0{{GammaAtom::R, 0}};
  REQUIRE(eval::kernel_crossover_check(r0, Complex(-2), 30) < -25);
  REQUIRE(eval::kernel_crossover_check(sym3, Complex(rd("-8.5")), 30) < -25);
  REQUIRE(eval::kernel_crossover_check(sym2, Complex(-1), 30) < -25);
}

TEST_CASE("zeta against Euler-Maclaurin") {
  PrecisionScope scope(80);
  eval::LFunctionSpec L = eval::zeta_spec(400);
  eval::solve_root_number(L, 30);
  REQUIRE(abs(*L.root_number - Complex(1)).log10_abs() < -25);
  for (Complex s : {Complex(2), Complex(rd("3.5")), Complex(rd("0.5"), rd("10")), Complex(rd("-1.5"), rd("2"))}) {
    eval::EvalOptions eo;
    eo.digits = 50;
    auto r = eval::evaluate(L, s, eo);
    Complex want = zeta_em(s, 60, 30);
    INFO("s = " << s.to_string(10));
    REQUIRE(rel(r.value, want) < -45);
    REQUIRE(r.certified);
  }
  // MPFR's zeta at an odd integer as a second reference
  eval::EvalOptions eo;
  eo.digits = 50;
  REQUIRE(rel(eval::evaluate(L, Complex(3), eo).value, Complex(num::zeta(3))) < -45);
}

TEST_CASE("L(Delta, s) against the direct Dirichlet series where it converges fast") {
  PrecisionScope scope(80);
  const std::size_t N = 2000;
  auto tau = oracle::ramanujan_tau(N);
  auto L = eval::build_lfunction(delta(3000), 1, chars::DirichletCharacter::trivial(1), 3000);
  auto rn = eval::solve_root_number(L, 30);
  REQUIRE(abs(rn.epsilon - Complex(1)).log10_abs() < -25);
  REQUIRE(L.conductor == 1);
  // classical s = 20: Σ τ(n) n^{−20}, tail below 10^{−42}
  Complex direct;
  for (std::size_t n = 1; n <= N; ++n) direct += Complex(Real(tau[n]) / pow(Real(static_cast<long>(n)), 20L));
  eval::EvalOptions eo;
  eo.digits = 45;
  auto r = eval::evaluate(L, Complex(rd("14.5")), eo);
  REQUIRE(rel(r.value, direct) < -40);
}

TEST_CASE("the line-integral and kernel routes give the same split sums") {
  PrecisionScope scope(60);
  auto L = eval::build_lfunction(delta(800), 1, chars::DirichletCharacter::trivial(1), 800);
  eval::solve_root_number(L, 25);
  Complex s(rd("0.7"), rd("1.1"));
  eval::EvalOptions a, b;
  a.digits = b.digits = 25;
  a.x = b.x = 0.9;
  b.line_integral = true;
  auto ka = eval::split_terms(L, s, a), lb = eval::split_terms(L, s, b);
  REQUIRE(rel(ka.P, lb.P) < -22);
  REQUIRE(rel(ka.Q, lb.Q) < -22);
  REQUIRE(rel(eval::completed_via_kernels(L, s, 25), ka.P + *L.root_number * ka.Q) < -20);
}

TEST_CASE("functional equation, root numbers and term doubling") {
  PrecisionScope scope(60);
  const auto triv = chars::DirichletCharacter::trivial(1);
  auto f18 = mf::level_one_newforms(18, 400)[0].members[0];
  auto L18 = eval::build_lfunction(f18, 1, triv, 400);
  eval::solve_root_number(L18, 25);
  // ε = i^k for level one
  REQUIRE(abs(*L18.root_number + Complex(1)).log10_abs() < -20);

  auto d = delta(6000);
  for (int r = 1; r <= 3; ++r) {
    auto L = eval::build_lfunction(d, r, triv, 6000);
    auto rn = eval::solve_root_number(L, 25);
    INFO("r = " << r);
    REQUIRE(rn.residual < -20);
    REQUIRE(std::abs(abs(rn.epsilon).to_double() - 1) < 1e-20);
    for (const auto& z : eval::probe_points(7, 2)) REQUIRE(eval::fe_residual(L, z, 30, 0.83) < -27);
    eval::EvalOptions eo;
    eo.digits = 30;
    auto res = eval::evaluate(L, Complex(rd("1.5")), eo);
    REQUIRE(res.fe_residual < -27);
    if (!std::isnan(res.doubling_residual)) REQUIRE(res.doubling_residual < -27);
  }
}

TEST_CASE("omitted primes are restored exactly") {
  PrecisionScope scope(60);
  auto d = delta(3000);
  const auto triv = chars::DirichletCharacter::trivial(1);
  auto full = eval::build_lfunction(d, 1, triv, 3000);
  auto part = eval::build_lfunction(d, 1, triv, 3000, false, {2, 3});
  eval::solve_root_number(full, 25);
  eval::solve_root_number(part, 25);
  eval::EvalOptions eo;
  eo.digits = 30;
  Complex s(rd("0.9"));
  auto a = eval::evaluate(full, s, eo), b = eval::evaluate(part, s, eo);
  REQUIRE(rel(b.full_value, a.value) < -27);
  REQUIRE(rel(b.value, a.value) > -3);
}

TEST_CASE("refusals") {
  PrecisionScope scope(40);
  auto d = delta(300);
  const auto triv = chars::DirichletCharacter::trivial(1);
  REQUIRE_THROWS_AS(eval::build_lfunction(d, 5, triv, 300), eval::FunctorialityRequired);
  REQUIRE_NOTHROW(eval::build_lfunction(d, 5, triv, 300, true));
  REQUIRE_THROWS_AS(eval::build_lfunction(d, 1, triv, 500), eval::InsufficientTerms);
  auto Z = eval::zeta_spec(100);
  eval::solve_root_number(Z, 20);
  REQUIRE_THROWS_AS(eval::evaluate(Z, Complex(1)), eval::GammaPole);
  REQUIRE_THROWS_AS(eval::evaluate(Z, Complex(-2)), eval::GammaPole);
  auto L = eval::build_lfunction(d, 1, triv, 300);
  REQUIRE_THROWS_AS(eval::evaluate(L, Complex(1)), std::logic_error);  // root number unknown
  eval::solve_root_number(L, 20);
  REQUIRE_THROWS_AS(eval::evaluate(L, Complex(-5.5)), eval::GammaPole);
}
