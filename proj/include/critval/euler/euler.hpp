#pragma once

// Satake parameters, symmetric-power and Rankin–Selberg local factors, and
// the exact Clebsch–Gordan factorization check.

#include "critval/modform/newform.hpp"

#include "json.hpp"

#include <optional>
#include <vector>

namespace critval::euler {

using exact::FieldElem;

struct SatakeData {
  long prime = 0;
  exact::FieldPtr field;
  FieldElem trace;  // a_p
  FieldElem det;    // ω(p) p^{k−1}
  int weight = 0;
  num::Complex alpha;
  num::Complex beta;
};

class BadPrime : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Roots of X² − a_p X + ω(p)p^{k−1} under the form's embedding, at
/// `digits` decimal digits.  Throws BadPrime when p | N.
SatakeData satake(const mf::Newform& f, long p, int digits);

/// Multiplies the variable X by ζ_order^exponent; `zero` means the
/// twisting character vanishes at p.
struct Twist {
  long order = 1;
  long exponent = 0;
  bool zero = false;

  static Twist none() { return {}; }
  static Twist vanishing() { return {1, 0, true}; }
  /// χ(p) as a twist.
  static Twist from_character(const chars::DirichletCharacter& chi, long p);
  Twist compose(const Twist& o) const;
};

/// L_p(X)^{-1} = Σ_j coeffs[j]·(ζ X)^j with ζ given by the twist.
struct EulerFactor {
  long prime = 0;
  exact::FieldPtr field;
  std::vector<FieldElem> coeffs;
  Twist twist;

  int degree() const { return twist.zero ? 0 : static_cast<int>(coeffs.size()) - 1; }
  /// Complex coefficients (twist applied) under the given embedding.
  std::vector<num::Complex> numeric(int embedding) const;
  /// Power sums p_1..p_len of the inverse roots, exactly (twist excluded).
  std::vector<FieldElem> power_sums(int len) const;
  /// Coefficients of 1/L_p^{-1}(X) = L_p(X) up to X^{len−1} (twist excluded).
  std::vector<FieldElem> inverse_series(int len) const;
};

/// ∏_{i=0}^{r} (1 − χ(p) α^{r−i} β^i X) by exact symmetric functions.
EulerFactor sym_euler_factor(const SatakeData& s, int r, Twist twist = Twist::none());

/// Same from exact trace/determinant only (no numeric roots needed).
EulerFactor sym_euler_factor_exact(long p, const exact::FieldPtr& K, const FieldElem& trace, const FieldElem& det,
                                   int r, Twist twist = Twist::none());

/// ∏_{i,j} (1 − γ_i δ_j X) for the inverse roots of two local factors at
/// the same prime.  Exact.  Throws std::invalid_argument on mismatched
/// primes or fields.
EulerFactor rankin_selberg_euler_factor(const EulerFactor& a, const EulerFactor& b);

/// Numeric variant on explicit parameter lists (used as an oracle).
std::vector<num::Complex> rankin_selberg_numeric(const std::vector<num::Complex>& a,
                                                 const std::vector<num::Complex>& b);

/// Scales X by an exact field element c: coefficient j gets c^j.
EulerFactor scale_variable(const EulerFactor& f, const FieldElem& c);
EulerFactor multiply(const EulerFactor& a, const EulerFactor& b);

struct CGRecord {
  long p = 0;
  int degree_lhs = 0;
  int degree_rhs = 0;
  bool equal = false;
  std::optional<int> first_mismatch;
};

struct CGReport {
  std::string form;
  int n = 0;
  long prime_bound = 0;
  std::vector<CGRecord> records;
  std::vector<long> skipped;  // primes dividing the level
  bool all_pass() const;
};

class FunctorialityRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RS(Sym^n, Sym^{n−1}) = ∏_{a=1}^{n} Sym^{2a−1}(det^{n−a} X) at every good
/// prime up to prime_bound.  n > 4 needs assume_functoriality.
CGReport verify_clebsch_gordan(const mf::Newform& f, int n, long prime_bound, bool assume_functoriality = false);

nlohmann::json to_json(const CGReport& r);

/// Primes up to n.
std::vector<long> primes_up_to(long n);

}  // namespace critval::euler
