#pragma once

// Assembled L-functions in analytic normalization (s <-> 1 - s) and their
// numerical evaluation.
//
// Λ(s) = A^s γ(s) L(s), A = √q, γ a product of Γ_R/Γ_C atoms, and
// Λ(s) = ε Λ*(1 − s) where Λ* has conjugated coefficients.

#include "critval/arch/arch.hpp"
#include "critval/euler/euler.hpp"
#include "critval/modform/newform.hpp"
#include "critval/numeric/complex.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critval::eval {

using num::Complex;
using num::Real;

/// Numeric Dirichlet coefficients b_1..b_M at a requested precision.
class CoefficientSource {
 public:
  virtual ~CoefficientSource() = default;
  virtual std::size_t available() const = 0;
  /// Entry 0 is unused.  Cached per (bits, M).
  std::shared_ptr<const std::vector<Complex>> get(std::size_t M, mpfr_prec_t bits) const;
  /// True when all b_n are real.
  virtual bool real_coefficients() const = 0;

 protected:
  virtual std::vector<Complex> compute(std::size_t M, mpfr_prec_t bits) const = 0;

 private:
  mutable std::mutex mu_;
  mutable std::map<std::pair<mpfr_prec_t, std::size_t>, std::shared_ptr<const std::vector<Complex>>> cache_;
};

/// b_n from exact local data: for each good prime p the coefficients of
/// L_p(X) up to the largest power of p below M, a root-of-unity twist and
/// the unitary normalization p^{−e·w/2}.
class EulerProductSource : public CoefficientSource {
 public:
  struct Prime {
    long p = 0;
    std::vector<exact::FieldElem> local;  // local[e] = coefficient of X^e
    euler::Twist twist;
  };
  EulerProductSource(exact::FieldPtr field, int embedding, long motivic_weight, std::size_t M,
                     std::vector<Prime> primes, bool real);
  std::size_t available() const override { return M_; }
  bool real_coefficients() const override { return real_; }
  /// Exact inverse-polynomial factor at p (empty when p is not stored).
  const Prime* prime_data(long p) const;

 protected:
  std::vector<Complex> compute(std::size_t M, mpfr_prec_t bits) const override;

 private:
  exact::FieldPtr field_;
  int embedding_;
  long weight_;
  std::size_t M_;
  std::vector<Prime> primes_;
  bool real_;
};

/// b_n given by a callback (tests and synthetic specs).
class FunctionSource : public CoefficientSource {
 public:
  using Fn = std::function<std::vector<Complex>(std::size_t M, mpfr_prec_t bits)>;
  FunctionSource(std::size_t M, bool real, Fn fn) : M_(M), real_(real), fn_(std::move(fn)) {}
  std::size_t available() const override { return M_; }
  bool real_coefficients() const override { return real_; }

 protected:
  std::vector<Complex> compute(std::size_t M, mpfr_prec_t bits) const override { return fn_(M, bits); }

 private:
  std::size_t M_;
  bool real_;
  Fn fn_;
};

/// Λ(w) ~ residue / (w − location).
struct PolarTerm {
  mpq_class location;
  mpq_class residue;
};

/// A known local factor removed from the coefficients (partial L) but
/// restored when evaluating so that the functional equation holds.
struct RestoredFactor {
  long p = 0;
  std::vector<exact::FieldElem> inverse_poly;  // L_p(X)^{-1}, constant first
  euler::Twist twist;
};

struct LFunctionSpec {
  std::string id;
  int degree = 1;
  long motivic_weight = 0;
  long conductor = 1;
  long conductor_bound = 1;
  bool conductor_confirmed = false;
  std::vector<arch::GammaAtom> gamma;
  std::shared_ptr<const CoefficientSource> coeffs;
  std::optional<Complex> root_number;
  std::vector<long> omitted_primes;
  std::vector<RestoredFactor> restored;
  exact::FieldPtr restored_field;
  int restored_embedding = 0;
  long restored_weight = 0;
  std::vector<PolarTerm> poles;
  std::string provenance;
  /// Σ_n |b_n| n^{−σ} ≤ ζ(σ)^degree (Ramanujan at good primes).
  int ramanujan_degree = 1;

  bool self_dual() const { return coeffs && coeffs->real_coefficients(); }
  /// Shift from classical to analytic variable: s_an = s_cl − shift.
  mpq_class classical_shift() const { return mpq_class(motivic_weight, 2); }
};

class FunctorialityRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GammaPole : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class InsufficientTerms : public std::runtime_error {
 public:
  InsufficientTerms(const std::string& msg, std::size_t required) : std::runtime_error(msg), required(required) {}
  std::size_t required;
};
class RootNumberFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L(s, Sym^r φ ⊗ ξ) in analytic normalization from the exact Euler
/// product over good primes p ≤ terms.  ξ is replaced by its primitive
/// character.  Primes in `omit` are dropped from the coefficients and
/// restored at evaluation time.  r ≥ 5 needs assume_functoriality.  Throws
/// InsufficientTerms when a_p is missing for some p ≤ terms.
LFunctionSpec build_lfunction(const mf::Newform& f, int r, const chars::DirichletCharacter& xi, std::size_t terms,
                              bool assume_functoriality = false, const std::vector<long>& omit = {});

/// Riemann zeta (degree 1, Γ_R(s), poles at 0 and 1).
LFunctionSpec zeta_spec(std::size_t terms);

struct EvalOptions {
  int digits = 50;       // target precision P
  int guard = 15;        // guard digits G
  std::size_t terms = 0; // 0 = pick automatically
  double x = 1.0;        // split parameter; Λ(s) is independent of it
  /// Contour quadrature instead of the kernel expansion (slow).
  bool line_integral = false;
};

/// Λ(s) = P + εQ − Σ_poles r x^{p−s}/(p − s) for the given split x.
struct SplitValue {
  Complex P;
  Complex Q;
  Complex polar;
  std::size_t terms = 0;
  int work_digits = 0;
  std::size_t nodes = 0;
};

/// Conjugate (dual) L-function when `dual` is set.
SplitValue split_terms(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual = false);

struct EvalResult {
  Complex s;
  Complex completed;  // Λ(s)
  Complex value;      // finite part L(s), omitted primes excluded
  Complex full_value; // with restored factors multiplied back in
  int certified_digits = 0;
  double fe_residual = 0;       // |Λ(s) − εΛ*(1 − s)| / max(|Λ(s)|, 1), different split
  double doubling_residual = 0; // |Λ_M − Λ_2M| / max(|Λ|, 1); NaN when skipped
  std::size_t terms = 0;
  int work_digits = 0;
  std::size_t nodes = 0;
  bool certified = false;
};

struct CertifyOptions {
  bool functional_equation = true;
  bool term_doubling = true;
  double fe_x = 0.83;
};

/// Finite-part value at s.  Throws GammaPole at poles of γ or Λ and
/// std::logic_error when the root number is unknown.
EvalResult evaluate(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt = {},
                    const CertifyOptions& cert = {});

/// Coefficients needed for the kernel sums at s, split x, `digits` digits
/// (uses gamma, conductor and ramanujan_degree only).
std::size_t required_terms(const LFunctionSpec& L, const Complex& s, int digits, double x = 1.0);

/// γ(s) = ∏ atoms, A^s γ(s).
Complex gamma_factor(const std::vector<arch::GammaAtom>& atoms, const Complex& s);
bool is_gamma_pole(const std::vector<arch::GammaAtom>& atoms, const Complex& s);

struct RootNumberResult {
  Complex epsilon;
  long conductor = 1;
  double residual = 0;
  /// (q, residual) for every candidate tried.
  std::vector<std::pair<long, double>> landscape;
};

/// Solves ε (and the conductor among divisors of conductor_bound) from the
/// x-independence of Λ; stores both in L.
RootNumberResult solve_root_number(LFunctionSpec& L, int digits = 30);

/// |Λ(s) − ε Λ*(1 − s)| / max(|Λ(s)|, 1) with Λ(s) split at x = 1 and
/// Λ*(1 − s) split at x_dual.
double fe_residual(const LFunctionSpec& L, const Complex& s, int digits, double x_dual);

/// Deterministic probe points from a seed.
std::vector<Complex> probe_points(std::uint64_t seed, int count);

/// K_s(t) = (1/2πi) ∫ γ(s+z) t^{−z} dz/z on a line right of all poles.
Complex mellin_kernel(const std::vector<arch::GammaAtom>& atoms, const Real& t, const Complex& s, int digits);
/// The two independent routes: residue series (small t) and contour
/// quadrature (any t, slow). The residue route throws invalid_argument
/// when a Γ_R shift sits off the pole lattice of another atom; evaluation
/// then takes the line integral.
Complex mellin_kernel_residues(const std::vector<arch::GammaAtom>& atoms, const Real& t, const Complex& s,
                               int digits);
Complex mellin_kernel_quadrature(const std::vector<arch::GammaAtom>& atoms, const Real& t, const Complex& s,
                                 int digits);
/// log10 of the largest relative disagreement of the two routes over
/// geometric samples of [lo, hi]; throws KernelCrossoverFailure above
/// 10^{−(digits − 5)}.
double kernel_crossover_check(const std::vector<arch::GammaAtom>& atoms, const Complex& s, int digits, double lo = 0.5,
                              double hi = 2.0, int samples = 4);

class KernelCrossoverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Λ(s) by the smoothed approximate functional equation
/// A^s Σ b_n n^{−s} K_s(n/A) + ε A^{1−s} Σ b̄_n n^{s−1} K_{1−s}(n/A).
/// Slow; used as an independent route at modest precision.
Complex completed_via_kernels(const LFunctionSpec& L, const Complex& s, int digits);

nlohmann::json to_json(const LFunctionSpec& L);
nlohmann::json to_json(const EvalResult& r, const std::string& spec_id, int digits);

}  // namespace critval::eval
