#include "catch_amalgamated.hpp"

#include "../support/oracles.hpp"

#include "critval/exact/field.hpp"
#include "critval/exact/poly.hpp"
#include "critval/exact/qseries.hpp"

using namespace critval;
using namespace critval::exact;

TEST_CASE("NTT series product agrees with schoolbook") {
  ZSeries a, b;
  mpz_class x = 1;
  for (int i = 0; i < 300; ++i) {
    x = (x * 1103515245 + 12345) % mpz_class("1000000000000000000000000000007");
    a.push_back(i % 3 == 0 ? mpz_class(-x) : x);
    b.push_back(x / (i + 1));
  }
  REQUIRE(series_mul(a, b, 300) == series_mul_naive(a, b, 300));
  REQUIRE(series_mul(a, b, 17) == series_mul_naive(a, b, 17));
}

TEST_CASE("Eisenstein series against divisor sums") {
  auto e4 = eisenstein(4, 60);
  auto e6 = eisenstein(6, 60);
  REQUIRE(e4[0] == 1);
  REQUIRE(e6[0] == 1);
  for (long n = 1; n < 60; ++n) {
    REQUIRE(e4[n] == 240 * oracle::sigma(3, n));
    REQUIRE(e6[n] == -504 * oracle::sigma(5, n));
  }
}

TEST_CASE("Delta from Eisenstein series matches the eta product") {
  const std::size_t N = 2000;
  auto d = delta_series(N + 1);
  auto tau = oracle::ramanujan_tau(N);
  REQUIRE(d[0] == 0);
  for (std::size_t n = 1; n <= N; ++n) REQUIRE(d[n] == tau[n]);
  REQUIRE(tau[2] == -24);
  REQUIRE(tau[11] == 534612);
}

TEST_CASE("rational polynomial arithmetic") {
  QPoly a{mpq_class(-2), mpq_class(0), mpq_class(1)};  // x^2 - 2
  QPoly b{mpq_class(1), mpq_class(1)};                 // x + 1
  QPoly q, r;
  poly_divmod(a, b, q, r);
  REQUIRE(poly_add(poly_mul(q, b), r) == a);
  QPoly s;
  QPoly g = poly_gcdex(b, a, s);
  REQUIRE(g == QPoly{mpq_class(1)});
  QPoly sb = poly_mul(s, b), qq, rr;
  poly_divmod(sb, a, qq, rr);
  REQUIRE(rr == QPoly{mpq_class(1)});
  auto cp = charpoly({{mpq_class(0), mpq_class(1)}, {mpq_class(2), mpq_class(0)}});
  REQUIRE(cp == a);
  REQUIRE(format_zpoly(parse_zpoly("-2 0 1")) == "-2 0 1");
}

TEST_CASE("quadratic field arithmetic and automorphisms") {
  // Q(√144169) via x^2 − x − 36042.
  auto K = std::make_shared<NumberField>(ZPoly{mpz_class(-36042), mpz_class(-1), mpz_class(1)});
  REQUIRE(K->degree() == 2);
  REQUIRE(K->is_irreducible());
  FieldElem t = K->gen();
  REQUIRE(K->sub(K->mul(t, t), K->add(t, K->from_int(36042))).is_zero());
  FieldElem a = K->add(K->mul_int(t, 3), K->from_rational(mpq_class(1, 7)));
  REQUIRE(K->mul(a, K->inv(a)) == K->one());
  auto autos = K->automorphisms();
  REQUIRE(autos.size() == 2);
  FieldElem conj = K->apply(autos[1], t);
  REQUIRE(conj == K->sub(K->one(), t));  // θ' = 1 − θ
  {
    num::PrecisionScope s(40);
    auto emb = K->embeddings();
    REQUIRE(emb.size() == 2);
    num::Complex diff = K->embed(t, 0) - K->embed(t, 1);
    num::Real want = sqrt(num::Real(144169));
    REQUIRE(abs(abs(diff) - want).log10_abs() < -35);
  }
  REQUIRE_FALSE(NumberField(ZPoly{mpz_class(-4), mpz_class(0), mpz_class(1)}).is_irreducible());
}

TEST_CASE("field elements format and parse") {
  auto K = std::make_shared<NumberField>(ZPoly{mpz_class(-2), mpz_class(0), mpz_class(1)});
  FieldElem a = K->from_coords({mpq_class(3, 4), mpq_class(-5, 6)});
  std::string text = K->format(a);
  std::vector<std::string> toks;
  std::string cur;
  for (char c : text + " ") {
    if (c == ' ') {
      if (!cur.empty()) toks.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  REQUIRE(K->parse(toks) == a);
  REQUIRE(K->as_rational(a) == std::nullopt);
  REQUIRE(K->as_rational(K->from_rational(mpq_class(2, 3))) == mpq_class(2, 3));
}
