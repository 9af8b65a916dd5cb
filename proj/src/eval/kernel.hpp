#pragma once

// Internal: the residue expansion of the Mellin kernel
//   K_s(t) = (1/2πi) ∫ γ(s+z) t^{−z} dz/z
// about t = 0, and the smoothed sums built from it.

#include "critval/eval/lfunction.hpp"

#include <optional>

namespace critval::eval {

/// K_s(t) = γ(s) + Σ_classes t^{s+β} Σ_a (ln t)^a Σ_j c[a][j] t^j, one class
/// per residue of the atom shifts modulo 1 (β the smallest shift).
class KernelSeries {
 public:
  /// Expansion accurate to absolute 10^log10_tau on [t_lo, t_hi].  nullopt
  /// when an atom's poles are off the half-integer lattice.
  static std::optional<KernelSeries> build(const std::vector<arch::GammaAtom>& atoms, const Complex& s, double t_lo,
                                           double t_hi, double log10_tau);

  /// Evaluation at the precision the series was built with.
  Complex operator()(const Real& t) const;
  Complex eval(const Real& t, const Real& ln_t) const;

  int work_digits() const { return work_digits_; }
  mpfr_prec_t bits() const { return bits_; }
  std::size_t length() const;

 private:
  struct Class {
    Complex s_beta;  // s + β
    double re_s_beta = 0;
    std::vector<std::vector<Complex>> c;  // c[a][j]
    std::vector<double> lm;               // log10 max_a |c[a][j]|
  };
  Complex g0_;
  std::vector<Class> classes_;
  double log10_tau_ = 0;
  int work_digits_ = 0;
  mpfr_prec_t bits_ = 0;
};

/// log10 of an upper bound for |K_s(t)|, in double precision.
double kernel_log10_bound(const std::vector<arch::GammaAtom>& atoms, double re_s, double t);

/// Smallest M for which the smoothed sum of L at s, truncated at M, has
/// absolute error below 10^log10_tau (both halves, split x).
std::size_t kernel_terms(const LFunctionSpec& L, const Complex& s, double x, double log10_tau);

SplitValue split_terms_kernel(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                              double log10_tau);

/// b_n for n ≤ M at `bits`, conjugated on request, restored factors
/// convolved back in.
std::vector<Complex> full_coefficients(const LFunctionSpec& L, std::size_t M, mpfr_prec_t bits, bool conjugate);

}  // namespace critval::eval
