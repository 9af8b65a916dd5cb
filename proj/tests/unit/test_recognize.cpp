#include "catch_amalgamated.hpp"

#include "critval/recognize/recognize.hpp"

using namespace critval;
using namespace critval::recognize;
using num::Complex;
using num::PrecisionScope;
using num::Real;

namespace {

Real rd(const char* s) { return Real(std::string_view(s)); }

using Mat = std::vector<std::vector<mpz_class>>;

// Gram–Schmidt coefficients μ and squared norms B, exactly.
void gram_schmidt(const Mat& b, std::vector<std::vector<mpq_class>>& mu, std::vector<mpq_class>& B) {
  const std::size_t n = b.size(), m = b[0].size();
  std::vector<std::vector<mpq_class>> bs(n, std::vector<mpq_class>(m));
  mu.assign(n, std::vector<mpq_class>(n, 0));
  B.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) bs[i][k] = b[i][k];
    for (std::size_t j = 0; j < i; ++j) {
      mpq_class dot = 0;
      for (std::size_t k = 0; k < m; ++k) dot += mpq_class(b[i][k]) * bs[j][k];
      mu[i][j] = dot / B[j];
      for (std::size_t k = 0; k < m; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
    }
    for (std::size_t k = 0; k < m; ++k) B[i] += bs[i][k] * bs[i][k];
  }
}

mpz_class det3(const Mat& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

TEST_CASE("LLL output is size-reduced, satisfies Lovasz and keeps the lattice") {
  Mat b{{mpz_class(1), mpz_class(0), mpz_class("31415926535897932")},
        {mpz_class(0), mpz_class(1), mpz_class("27182818284590452")},
        {mpz_class(0), mpz_class(0), mpz_class("100000000000000000")}};
  mpz_class d0 = det3(b);
  lll_reduce(b);
  REQUIRE(abs(det3(b)) == abs(d0));
  std::vector<std::vector<mpq_class>> mu;
  std::vector<mpq_class> B;
  gram_schmidt(b, mu, B);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) REQUIRE(abs(mu[i][j]) <= mpq_class(1, 2));
  for (std::size_t k = 1; k < b.size(); ++k)
    REQUIRE(B[k] >= (mpq_class(99, 100) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]);
}

TEST_CASE("rationals and quadratic irrationals are recognized") {
  PrecisionScope s(80);
  auto r = recognize_algebraic(Complex(Real(22) / Real(7)), 1, 0, 40);
  REQUIRE(r.verdict == Verdict::Recognized);
  REQUIRE(*r.rational == mpq_class(22, 7));

  Real phi = (Real(1) + sqrt(Real(5))) / Real(2);
  auto q = recognize_algebraic(Complex(phi), 2, 0, 40);
  REQUIRE(q.verdict == Verdict::Recognized);
  REQUIRE(q.candidate == std::vector<mpz_class>{-1, -1, 1});

  auto n = recognize_algebraic(Complex(-Real(8064) / Real(15625)), 2, mpz_class("1000000000000"), 50);
  REQUIRE(*n.rational == mpq_class(-8064, 15625));
}

TEST_CASE("transcendental-looking inputs are rejected") {
  PrecisionScope s(80);
  auto r = recognize_algebraic(Complex(num::const_pi()), 3, 0, 40);
  // at degree 3 some relation fits the residual bar; the margin rejects it
  REQUIRE(r.verdict == Verdict::Inconclusive);
  REQUIRE(r.margin < 0);
  REQUIRE_FALSE(r.note.empty());
  REQUIRE(recognize_algebraic(Complex(num::const_pi()), 1, 0, 40).verdict == Verdict::NotRecognized);
  // π to only 12 digits looks like a rational; with 40 claimed digits it must not pass
  Complex pi12(rd("3.14159265358979"));
  REQUIRE(recognize_algebraic(pi12, 1, 0, 40).verdict != Verdict::Recognized);
}

TEST_CASE("precision guard and margin semantics") {
  PrecisionScope s(80);
  REQUIRE_THROWS_AS(recognize_algebraic(Complex(Real(1) / Real(3)), 4, 0, 30), PrecisionRefusal);
  try {
    recognize_algebraic(Complex(Real(1) / Real(3)), 4, 0, 30);
  } catch (const PrecisionRefusal& e) {
    REQUIRE(e.required == 40);
  }
  // A relation that fits but cannot clear an inflated margin is inconclusive.
  Thresholds strict;
  strict.margin_exponent = 5.0;
  auto r = recognize_algebraic(Complex(Real(22) / Real(7)), 1, 0, 40, strict);
  REQUIRE(r.verdict == Verdict::Inconclusive);
  // Height bound below the true height: not recognized.
  auto h = recognize_algebraic(Complex(Real(123457) / Real(1000003)), 1, 1000, 40);
  REQUIRE(h.verdict != Verdict::Recognized);
}

TEST_CASE("recognition inside a number field") {
  PrecisionScope s(80);
  auto K = std::make_shared<exact::NumberField>(exact::ZPoly{mpz_class(-5), mpz_class(0), mpz_class(1)});
  auto a = K->from_coords({mpq_class(3, 7), mpq_class(-2, 7)});
  for (int e = 0; e < 2; ++e) {
    Complex z = K->embed(a, e);
    auto r = recognize_in_field(z, K, e, 0, 40);
    REQUIRE(r.verdict == Verdict::Recognized);
    REQUIRE(*r.field_value == a);
  }
  auto j = to_json(recognize_in_field(K->embed(a, 0), K, 0, 0, 40), K.get());
  REQUIRE(j.contains("verdict"));
}

TEST_CASE("double ratios are invariant under common rescalings") {
  PrecisionScope s(60);
  Complex t1(rd("1.234"), rd("0.5")), t2(rd("-0.75"), rd("2.1")), u(rd("0.9"));
  Complex g1(rd("2.2"), rd("0.3")), g2(rd("1.1"), rd("-1.9"));
  Complex D = double_ratio(t1, t2, u, g1, g2, 2);
  Complex c(rd("3.7"), rd("-1.2")), lam = Complex::unit(rd("0.77"));
  // a common period factor on the twisted values, another on the untwisted one,
  // and a unit convention factor on the Gauss sums all cancel
  Complex D2 = double_ratio(c * t1, c * t2, u * Complex(rd("5.5")), lam * g1, lam * g2, 2);
  REQUIRE(abs(D - D2).log10_abs() < -50);
  REQUIRE(abs(twist_ratio(t1, u, g1, 2) - t1 / (g1 * g1 * u)).log10_abs() < -50);
}

TEST_CASE("experiment preconditions") {
  auto f = mf::level_one_newforms(12, 400)[0].members[0];
  auto odd = chars::DirichletCharacter::parse("4.1");
  REQUIRE_FALSE(odd.is_even());
  ExperimentOptions o;
  o.precision = 30;
  REQUIRE_THROWS_AS(twist_ratio_experiment(f, 1, odd, o), PreconditionRefusal);
  REQUIRE_THROWS_AS(twist_ratio_experiment(f, 3, chars::DirichletCharacter::parse("5.2"), o),
                    eval::FunctorialityRequired);
  // L(f, 1/2) = 0 for the weight 18 form (root number −1): dividing by it is refused
  auto g = mf::level_one_newforms(18, 2000)[0].members[0];
  o.classical_point = mpq_class(9);
  o.terms = 2000;
  REQUIRE_THROWS_AS(twist_ratio_experiment(g, 1, chars::DirichletCharacter::parse("5.2"), o), DivisionHazard);
}

TEST_CASE("weight 12 Shimura ratio at modest precision") {
  auto f = mf::level_one_newforms(12, 3000)[0].members[0];
  ExperimentOptions o;
  o.precision = 30;
  o.height_bound = mpz_class("1000000000000");
  auto rep = twist_ratio_experiment(f, 1, chars::DirichletCharacter::parse("5.2"), o);
  REQUIRE(rep.recognition.verdict == Verdict::Recognized);
  REQUIRE(rep.recognition.rational.has_value());
  REQUIRE(rep.json["schema"] == 1);
  REQUIRE(rep.json["label"] == "numerically consistent with the predicted algebraicity (evidence, not proof)");
}
