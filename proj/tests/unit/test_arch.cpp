#include "catch_amalgamated.hpp"

#include "critval/arch/arch.hpp"

#include <algorithm>

using namespace critval;
using arch::GammaAtom;

namespace {

std::vector<GammaAtom> sorted(std::vector<GammaAtom> v) {
  std::sort(v.begin(), v.end(), [](const GammaAtom& a, const GammaAtom& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.shift < b.shift;
  });
  return v;
}

GammaAtom R(mpq_class s) { return {GammaAtom::R, s}; }
GammaAtom C(mpq_class s) { return {GammaAtom::C, s}; }

// The listed set {(1−k)/2, …, (k−3)/2} for even k, {(2−k)/2, …, (k−2)/2} for odd k.
std::vector<mpq_class> listed(int k) {
  std::vector<mpq_class> out;
  int lo = k % 2 == 0 ? 1 - k : 2 - k, hi = k % 2 == 0 ? k - 3 : k - 2;
  for (int t = lo; t <= hi; t += 2) {
    mpq_class v(t, 2);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("gamma factors of small symmetric powers") {
  const int k = 12;
  // Sym^1: Γ_C(s + (k−1)/2)
  REQUIRE(sorted(arch::gamma_shifts(arch::sym_arch_parameter(k, 1))) == sorted({C(mpq_class(11, 2))}));
  // Sym^2: Γ_R(s + 1) Γ_C(s + k − 1)
  REQUIRE(sorted(arch::gamma_shifts(arch::sym_arch_parameter(k, 2))) == sorted({R(1), C(11)}));
  // Sym^3: Γ_C(s + (k−1)/2) Γ_C(s + 3(k−1)/2)
  REQUIRE(sorted(arch::gamma_shifts(arch::sym_arch_parameter(k, 3))) ==
          sorted({C(mpq_class(11, 2)), C(mpq_class(33, 2))}));
  // odd weight Sym^2: Γ_R(s) Γ_C(s + k − 1)
  REQUIRE(sorted(arch::gamma_shifts(arch::sym_arch_parameter(7, 2))) == sorted({R(0), C(6)}));
  for (int r = 0; r <= 7; ++r) REQUIRE(arch::sym_arch_parameter(12, r).total_degree() == r + 1);
}

TEST_CASE("tensor products and duals of archimedean parameters") {
  using arch::Summand;
  arch::ArchParameter a{{Summand::induced(3)}, 0}, b{{Summand::induced(1)}, mpq_class(1, 2)};
  auto t = arch::tensor(a, b);
  REQUIRE(t.total_degree() == 4);
  REQUIRE(t.norm_shift == mpq_class(1, 2));
  REQUIRE(arch::dual(t).norm_shift == mpq_class(-1, 2));
  arch::ArchParameter c{{Summand::induced(2)}, 0};
  auto u = arch::tensor(c, c);  // I(4) ⊕ I(0) = I(4) ⊕ 1 ⊕ ε
  REQUIRE(u.total_degree() == 4);
  REQUIRE(std::count(u.summands.begin(), u.summands.end(), Summand::sign(1)) == 1);
  REQUIRE(std::count(u.summands.begin(), u.summands.end(), Summand::sign(0)) == 1);
}

TEST_CASE("first-principles critical sets match the listed sets") {
  for (int k = 3; k <= 16; ++k)
    for (int n = 1; n <= 5; ++n) {
      INFO("k = " << k << ", n = " << n);
      auto d = arch::twist_recipe(k, n);
      auto fp = arch::critical_set_first_principles(d.pair_atoms(), d.dual_pair_atoms());
      REQUIRE(fp == listed(k));
      REQUIRE(d.critical_set == listed(k));
      REQUIRE(arch::critical_set_table(k, n) == listed(k));
      REQUIRE(std::find(fp.begin(), fp.end(), mpq_class(1, 2)) != fp.end());
    }
}

TEST_CASE("signs and interlacing") {
  for (int k = 4; k <= 12; ++k)
    for (int n = 1; n <= 4; ++n) {
      auto d = arch::twist_recipe(k, n);
      if (n % 2 == 0) {
        REQUIRE(d.epsilon == ((n * (n + 1) / 2) % 2 ? -1 : 1));
        REQUIRE(d.eta == -d.epsilon);
      } else {
        REQUIRE(d.eta == ((n * (n - 1) / 2) % 2 ? -1 : 1));
        REQUIRE(d.epsilon == d.eta);
      }
      REQUIRE(arch::interlaces(d.mu, d.lambda));
    }
  REQUIRE_THROWS_AS(arch::twist_recipe(2, 1), arch::InterlacingFailure);
  REQUIRE_THROWS_AS(arch::twist_recipe(2, 3), arch::InterlacingFailure);
}

TEST_CASE("classical critical point and Gauss exponent") {
  for (int k = 3; k <= 30; ++k)
    for (int n = 1; n <= 4; ++n) {
      mpq_class want((2 * n - 1) * (k - 1) + (k % 2 == 0 ? 3 : 2), 2);
      want.canonicalize();
      REQUIRE(arch::classical_critical_point(k, n) == want);
    }
  REQUIRE(arch::classical_critical_point(12, 1) == 7);
  REQUIRE(arch::classical_critical_point(12, 2) == 18);
  // analytic point m − (2n−1)(k−1)/2 is 3/2 for even k
  REQUIRE(arch::classical_critical_point(12, 3) - mpq_class(5 * 11, 2) == mpq_class(3, 2));
  for (int n = 1; n <= 9; n += 2) REQUIRE(arch::gauss_exponent(n, 12, 0) == (n + 1) / 2);
}

TEST_CASE("JSON carries every field") {
  auto j = arch::to_json(arch::twist_recipe(12, 2));
  for (const char* key : {"k", "n", "critical_set", "classical_m", "gamma_pair", "gamma_dual_pair"})
    REQUIRE(j.contains(key));
}
