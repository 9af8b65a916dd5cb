#pragma once

// Archimedean parameters of symmetric powers, gamma factors, critical sets
// and the twist/weight/sign bookkeeping for (Sym^n, Sym^{n-1}) pairs.

#include "critval/characters/character.hpp"

#include "json.hpp"

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace critval::arch {

/// I(χ_b) (value = b > 0) or ε^e (value = e ∈ {0, 1}).
struct Summand {
  enum Kind { Induced, Sign } kind = Sign;
  long value = 0;

  static Summand induced(long b) { return {Induced, b}; }
  static Summand sign(long e) { return {Sign, ((e % 2) + 2) % 2}; }
  int degree() const { return kind == Induced ? 2 : 1; }
  bool operator==(const Summand&) const = default;
};

/// Parameter of W_R as a direct sum, times ‖·‖^norm_shift.
struct ArchParameter {
  std::vector<Summand> summands;
  mpq_class norm_shift = 0;

  int total_degree() const;
  /// All induced b distinct and positive.
  bool is_regular() const;
  std::string to_string() const;
};

/// Γ_R(s + shift) or Γ_C(s + shift).
struct GammaAtom {
  enum Kind { R, C } kind = R;
  mpq_class shift = 0;

  int degree() const { return kind == C ? 2 : 1; }
  /// True when s + shift is a pole of the atom.
  bool has_pole_at(const mpq_class& s) const;
  std::string to_string() const;
  bool operator==(const GammaAtom&) const = default;
};

class UnsupportedCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sym^r(I(χ_{k−1})) ⊗ sgn^sign_twist ⊗ ‖·‖^norm_shift.
ArchParameter sym_arch_parameter(int k, int r, const mpq_class& norm_shift = 0, int sign_twist = 0);

/// I(χ_b) ↦ Γ_C(s + t + b/2), ε^e ↦ Γ_R(s + t + e) with t the norm shift.
std::vector<GammaAtom> gamma_shifts(const ArchParameter& p);

/// Tensor product: I(a)⊗I(b) = I(a+b) ⊕ I(|a−b|) (I(0) = 1 ⊕ ε),
/// I(b)⊗ε = I(b), ε^e⊗ε^f = ε^{e+f}; norm shifts add.
ArchParameter tensor(const ArchParameter& a, const ArchParameter& b);
/// Contragredient: summands are self-dual, the norm shift flips sign.
ArchParameter dual(const ArchParameter& p);

/// Listed critical set for the pair at weight k (independent of n).
std::vector<mpq_class> critical_set_table(int k, int n);

/// Points s ∈ offset + Z with |s| ≤ window where no atom of `pair` has a
/// pole at s and no atom of `dual_pair` has a pole at 1 − s.  window = 0
/// picks a window wide enough to contain every critical point.
std::vector<mpq_class> critical_set_first_principles(const std::vector<GammaAtom>& pair,
                                                     const std::vector<GammaAtom>& dual_pair,
                                                     const mpq_class& offset = mpq_class(1, 2),
                                                     long window = 0);

/// Classical critical point of Sym^{2n−1} at the right of the center.
mpq_class classical_critical_point(int k, int n);

/// θ^theta_power ⊗ (ξ if with_xi) ⊗ ‖·‖^norm.
struct TwistDescriptor {
  int theta_power = 0;
  bool with_xi = false;
  mpq_class norm = 0;
  std::string to_string() const;
};

/// (k−2)ρ_len + shift as an explicit vector.
struct Weight {
  int coeff = 0;
  int length = 0;
  mpq_class shift = 0;
  std::vector<mpq_class> components() const;
  std::string to_string() const;
};

struct CriticalDatum {
  int k = 0;
  int n = 0;
  std::string parity_case;  // "k-even,n-even" ...
  std::string xi_label;
  std::string theta_label;
  TwistDescriptor pi_twist;
  TwistDescriptor sigma_twist;
  Weight mu;
  Weight lambda;
  int epsilon = 1;
  int eta = 1;
  std::vector<mpq_class> critical_set;
  mpq_class classical_m;

  /// Parameters of Π = Sym^n ⊗ pi_twist and Σ = Sym^{n−1} ⊗ sigma_twist.
  ArchParameter pi_parameter() const;
  ArchParameter sigma_parameter() const;
  /// Gamma atoms of Π × Σ and of its dual.
  std::vector<GammaAtom> pair_atoms() const;
  std::vector<GammaAtom> dual_pair_atoms() const;
};

/// μ^∨ ≻ λ: μ^∨_1 ≥ λ_1 ≥ μ^∨_2 ≥ ... ≥ λ_n ≥ μ^∨_{n+1}.
bool interlaces(const Weight& mu, const Weight& lambda);

class InterlacingFailure : public UnsupportedCase {
 public:
  using UnsupportedCase::UnsupportedCase;
};

/// The four (k, n) parity cases.  θ must be an odd quadratic character.
/// Throws InterlacingFailure when μ^∨ ≻ λ fails (k too small).
CriticalDatum twist_recipe(int k, int n, const chars::DirichletCharacter& xi, const chars::DirichletCharacter& theta);
/// Same with placeholder labels, for tables.
CriticalDatum twist_recipe(int k, int n);

/// Predicted exponent of the Gauss sum of an even twist of Sym^n at m.
int gauss_exponent(int n, int k, long m);

std::string format_half_integer(const mpq_class& q);
nlohmann::json to_json(const CriticalDatum& d);
nlohmann::json to_json(const std::vector<GammaAtom>& atoms);

/// Fixed-layout text table over k ∈ [k_lo, k_hi], n ∈ [n_lo, n_hi]; rows
/// whose recipe fails print the refusal instead.
std::string critical_table_text(int k_lo, int k_hi, int n_lo, int n_hi);

}  // namespace critval::arch
