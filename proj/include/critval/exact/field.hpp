#pragma once

// Number fields Q[x]/(f) with elements in the power basis of the generator.

#include "critval/exact/poly.hpp"
#include "critval/numeric/complex.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace critval::exact {

/// Σ num[i]·θ^i / den with den > 0 and content(num, den) = 1.
struct FieldElem {
  std::vector<mpz_class> num;
  mpz_class den = 1;

  bool operator==(const FieldElem& o) const;
  bool operator!=(const FieldElem& o) const { return !(*this == o); }
  bool is_zero() const;
  /// Coordinate i as a rational.
  mpq_class coord(std::size_t i) const;
};

class NumberField {
 public:
  /// f must be irreducible over Q, degree ≥ 1, integer coefficients
  /// constant-first.
  explicit NumberField(ZPoly f);

  static std::shared_ptr<const NumberField> rationals();

  int degree() const { return deg_; }
  const ZPoly& poly() const { return f_; }
  bool is_rational() const { return deg_ == 1; }

  FieldElem zero() const;
  FieldElem one() const;
  FieldElem from_int(const mpz_class& v) const;
  FieldElem from_rational(const mpq_class& v) const;
  FieldElem from_coords(const std::vector<mpq_class>& c) const;
  /// The class of x (the generator θ).
  FieldElem gen() const;

  FieldElem add(const FieldElem& a, const FieldElem& b) const;
  FieldElem sub(const FieldElem& a, const FieldElem& b) const;
  FieldElem neg(const FieldElem& a) const;
  FieldElem mul(const FieldElem& a, const FieldElem& b) const;
  FieldElem mul_int(const FieldElem& a, const mpz_class& b) const;
  FieldElem div_int(const FieldElem& a, const mpz_class& b) const;
  FieldElem inv(const FieldElem& a) const;
  FieldElem pow(const FieldElem& a, unsigned long e) const;
  /// Evaluates a polynomial with rational coefficients at an element.
  FieldElem eval_poly(const QPoly& p, const FieldElem& x) const;

  /// Rational value if a lies in Q.
  std::optional<mpq_class> as_rational(const FieldElem& a) const;

  /// Complex roots of f at working precision, in deterministic order.
  std::vector<num::Complex> embeddings() const;
  num::Complex embed(const FieldElem& a, int embedding) const;

  /// Numeric factor-subset test followed by exact division of any
  /// candidate factor.
  bool is_irreducible() const;

  /// Automorphisms θ ↦ g(θ), found numerically and verified exactly
  /// (f(g(θ)) ≡ 0).  Always contains the identity first.
  std::vector<QPoly> automorphisms() const;
  FieldElem apply(const QPoly& sigma, const FieldElem& a) const;

  /// "c0 c1 ..." with rationals as p/q.
  std::string format(const FieldElem& a) const;
  FieldElem parse(const std::vector<std::string>& tokens) const;

 private:
  void normalize(FieldElem& a) const;
  void reduce(std::vector<mpz_class>& num, mpz_class& den) const;
  const std::vector<num::Complex>& roots_at(mpfr_prec_t bits) const;

  ZPoly f_;
  int deg_;
  mutable std::mutex mu_;
  mutable std::map<mpfr_prec_t, std::vector<num::Complex>> root_cache_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

}  // namespace critval::exact
