#pragma once

// Integer-relation recognition of high-precision numbers and the
// twist-ratio / Galois experiments built on it.

#include "critval/characters/character.hpp"
#include "critval/eval/lfunction.hpp"
#include "critval/exact/field.hpp"
#include "critval/modform/newform.hpp"
#include "critval/numeric/complex.hpp"

#include "json.hpp"

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critval::recognize {

using num::Complex;
using num::Real;

/// LLL reduction (δ = 0.99) of integer row vectors, exact rational
/// Gram–Schmidt.  Rows must be linearly independent.
void lll_reduce(std::vector<std::vector<mpz_class>>& basis, const mpq_class& delta = mpq_class(99, 100));

enum class Verdict { Recognized, NotRecognized, Inconclusive };
std::string to_string(Verdict v);

struct Thresholds {
  double residual_exponent = 0.6;  // residual < 10^{−0.6 P}
  double height_exponent = 0.25;   // height ≤ 10^{⌊0.25 P⌋}
  /// −log10 residual − (d+1)·log10 height − d·log10(1+|z|) ≥ 0.1 P
  double margin_exponent = 0.1;
};

struct RecognitionResult {
  Complex input;
  int precision = 0;
  int degree_bound = 0;
  mpz_class height_bound;     // as requested (0 = no extra bound)
  mpz_class effective_height; // min(requested, 10^{⌊0.25 P⌋})
  /// Integer polynomial, constant first; empty when none.
  std::vector<mpz_class> candidate;
  /// p/q when the candidate is linear.
  std::optional<mpq_class> rational;
  /// Coordinates in the power basis when recognized inside a number field.
  std::optional<exact::FieldElem> field_value;
  double log10_residual = 0;
  double margin = 0;
  Verdict verdict = Verdict::NotRecognized;
  int digits_consumed = 0;
  std::string note;
};

/// Raised when P < 10·degree_bound.
class PrecisionRefusal : public std::invalid_argument {
 public:
  PrecisionRefusal(const std::string& msg, int required) : std::invalid_argument(msg), required(required) {}
  int required;
};

/// Searches integer relations among 1, z, …, z^d for d = 1..degree_bound.
RecognitionResult recognize_algebraic(const Complex& z, int degree_bound, const mpz_class& height_bound, int precision,
                                      const Thresholds& th = {});

/// Searches z = Σ c_i θ^i with θ the chosen embedding of the generator.
RecognitionResult recognize_in_field(const Complex& z, const exact::FieldPtr& K, int embedding,
                                     const mpz_class& height_bound, int precision, const Thresholds& th = {});

nlohmann::json to_json(const RecognitionResult& r, const exact::NumberField* K = nullptr);

/// Raised when an L-value that divides is below 10^{−P/2}.
class DivisionHazard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Precondition failures (odd twist without exploratory mode, ...).
class PreconditionRefusal : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentOptions {
  int precision = 50;
  std::size_t terms = 0;  // 0 = sized automatically
  bool assume_functoriality = false;
  bool exploratory = false;
  mpz_class height_bound = 0;  // 0 = 10^{⌊0.25 P⌋}
  /// Classical evaluation point; empty = the predicted critical m.
  std::optional<mpq_class> classical_point;
  Thresholds thresholds;
};

/// r = L(Sym^{2n−1} φ ⊗ ξ) / (𝔤(ξ)^e L(Sym^{2n−1} φ)) with e the Gauss-sum exponent.
Complex twist_ratio(const Complex& twisted, const Complex& untwisted, const Complex& gauss, int exponent);
/// r(ξ1) / r(ξ2).
Complex double_ratio(const Complex& tw1, const Complex& tw2, const Complex& untwisted, const Complex& g1,
                     const Complex& g2, int exponent);

struct LValueRecord {
  std::string spec_id;
  eval::EvalResult result;
  eval::RootNumberResult root;
  long conductor = 1;
};

struct TwistReport {
  nlohmann::json json;
  RecognitionResult recognition;
  Complex ratio;
  bool exploratory = false;
};

/// Builds both L-functions, evaluates at the critical point, divides and
/// recognizes over Q(φ, ξ).
TwistReport twist_ratio_experiment(const mf::Newform& f, int n, const chars::DirichletCharacter& xi,
                                   const ExperimentOptions& opt = {});

struct GaloisReport {
  nlohmann::json json;
  std::vector<Complex> double_ratios;          // per orbit member
  std::vector<RecognitionResult> recognitions; // per orbit member
  double log10_equivariance_residual = 0;      // |σ(α_0) − D_i| worst case, NaN if α_0 not found
  bool equivariant = false;
};

GaloisReport galois_equivariance_experiment(const mf::NewformOrbit& orbit, int n, const chars::DirichletCharacter& xi1,
                                            const chars::DirichletCharacter& xi2, const ExperimentOptions& opt = {});

/// Coefficient count needed to evaluate L(Sym^r φ ⊗ ξ) at analytic s to
/// `digits` with doubling headroom (conductor taken at its upper bound).
std::size_t suggested_terms(int weight, int r, long xi_conductor, long level, const Complex& s, int digits);

}  // namespace critval::recognize
