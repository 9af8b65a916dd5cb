#pragma once

// Dirichlet characters stored exactly as root-of-unity exponents.

#include "critval/numeric/complex.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace critval::chars {

/// Structure of (Z/q)^*: generators with their orders, and the discrete
/// logarithm of every unit on them.
struct UnitGroup {
  long modulus = 1;
  std::vector<long> generators;
  std::vector<long> orders;
  long exponent = 1;  // lcm of orders
  /// dlog[a] is the exponent vector of a, empty if gcd(a, q) > 1.
  std::vector<std::vector<long>> dlog;

  static std::shared_ptr<const UnitGroup> get(long q);
};

class DirichletCharacter {
 public:
  /// The principal character mod q.
  static DirichletCharacter trivial(long q = 1);
  /// Character with χ(g_i) = exp(2πi·x_i/n_i) on the fixed generators.
  static DirichletCharacter from_exponents(long q, const std::vector<long>& x);
  /// Character mod q given by a function a ↦ χ(a) as a fraction e/m of a
  /// full turn (only called on units).
  static DirichletCharacter from_values(long q, long m, const std::function<long(long)>& exp_of);
  /// Parses "q.i" or "q.triv" (or "trivial" for the character mod 1).
  static DirichletCharacter parse(const std::string& label);

  long modulus() const { return q_; }
  long order() const { return m_; }
  long conductor() const { return conductor_; }
  int parity() const { return parity_; }
  bool is_even() const { return parity_ == 1; }
  bool is_primitive() const { return conductor_ == q_; }
  bool is_trivial() const { return m_ == 1; }
  long index() const { return index_; }
  const std::vector<long>& exponents() const { return x_; }
  std::string label() const;

  /// e with χ(a) = ζ_m^e, or nullopt when gcd(a, q) > 1.
  std::optional<long> exp(long a) const;
  /// Numeric value at working precision (0 for non-units).
  num::Complex value(long a) const;

  bool operator==(const DirichletCharacter& o) const { return q_ == o.q_ && x_ == o.x_; }

 private:
  DirichletCharacter() = default;
  void finish();

  long q_ = 1;
  long m_ = 1;
  long conductor_ = 1;
  int parity_ = 1;
  long index_ = 0;
  std::vector<long> x_;
  std::vector<long> table_;  // exponent mod m_, -1 for non-units
  std::shared_ptr<const UnitGroup> group_;
};

/// All characters mod q in index order, optionally filtered by parity.
std::vector<DirichletCharacter> enumerate_characters(long q, std::optional<int> parity = std::nullopt);

/// The primitive character inducing χ.
DirichletCharacter primitivize(const DirichletCharacter& chi);

/// Product of characters as a character modulo lcm of the moduli.
DirichletCharacter character_product(const DirichletCharacter& a, const DirichletCharacter& b);

/// Σ_{a mod c} χ0(a) e^{2πia/c} for the primitive χ0 inducing χ, at
/// `digits` decimal digits.
num::Complex gauss_sum(const DirichletCharacter& chi, int digits);

/// |𝔤(χ1χ2) − χ1(c2)χ2(c1)𝔤(χ1)𝔤(χ2)| for primitive characters of coprime
/// conductors.  Throws std::invalid_argument otherwise.
num::Real gauss_sum_product_check(const DirichletCharacter& chi1, const DirichletCharacter& chi2, int digits);

}  // namespace critval::chars
