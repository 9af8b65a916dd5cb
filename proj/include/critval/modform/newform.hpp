#pragma once

// Hecke eigenforms with exact coefficients in their eigenvalue field.

#include "critval/characters/character.hpp"
#include "critval/exact/field.hpp"
#include "critval/exact/qseries.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critval::mf {

struct Newform {
  int weight = 0;
  long level = 1;
  chars::DirichletCharacter nebentypus = chars::DirichletCharacter::trivial(1);
  /// Token used for the character in coefficient files ("trivial" or a label).
  std::string chi_token = "trivial";
  exact::FieldPtr field = exact::NumberField::rationals();
  /// Index into field->embeddings().
  int embedding = 0;
  /// coeffs[n] = a_n for 1 ≤ n ≤ M; coeffs[0] is unused (zero).
  std::vector<exact::FieldElem> coeffs;
  std::string label;

  std::size_t coefficient_count() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  const exact::FieldElem& a(std::size_t n) const { return coeffs.at(n); }
  /// a_n under the stored embedding, at working precision.
  num::Complex a_numeric(std::size_t n) const;
  /// ω(p)·p^{k−1} exactly, for p ∤ N.
  exact::FieldElem hecke_det(long p) const;

  /// Exact field elements representing the values ω(p), keyed by the
  /// exponent of ω(p) as a root of unity.  Filled by prepare().
  std::map<long, exact::FieldElem> omega_values;
  /// Populates omega_values from a_p^2 − a_{p^2} at the smallest prime of
  /// each character class.  Throws IngestError if some class is unseen.
  void prepare();
};

/// A Galois orbit: members[i] has coefficients sigma[i](a_n(members[0])),
/// all expressed in the same field under the same embedding.
struct NewformOrbit {
  std::vector<Newform> members;
  std::vector<exact::QPoly> sigma;
};

struct InvariantViolation {
  std::string relation;     // "normalization", "multiplicativity", ...
  std::vector<long> indices;
  std::string detail;
};

class IngestError : public std::runtime_error {
 public:
  explicit IngestError(InvariantViolation v)
      : std::runtime_error(v.detail), violation(std::move(v)) {}
  InvariantViolation violation;
};

class UnsupportedDegree : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dim S_k(SL_2(Z)).
int cusp_dimension(int k);

/// Echelonized basis of S_k(SL_2(Z)) to q^{n_terms}: element i is
/// q^{i+1} + O(q^{d+1}).  Each series has n_terms + 1 entries (index 0 is
/// the constant term).  Odd or small weights give an empty list.
std::vector<exact::ZSeries> victor_miller_basis(int weight, std::size_t n_terms);

/// Newforms of level 1 grouped into Galois orbits.  Throws
/// UnsupportedDegree when the eigenvalue field exceeds degree_bound.
std::vector<NewformOrbit> level_one_newforms(int weight, std::size_t n_terms, int degree_bound = 4);

struct CheckOptions {
  int digits = 50;           // working precision for numeric checks
  bool ramanujan = true;
  bool all_embeddings = true;
};

/// First violated invariant, if any.
std::optional<InvariantViolation> check_invariants(const Newform& f, const CheckOptions& opt = {});

/// Coefficient file I/O.
Newform parse_coefficients(std::istream& in);
Newform load_coefficients(const std::string& path);
std::string format_coefficients(const Newform& f);
void write_coefficients(const Newform& f, const std::string& path);

}  // namespace critval::mf
