#pragma once

// Internal: contour-quadrature planning and execution shared by the
// L-function evaluator and the Mellin kernel.
//
// A line integral here is (1/2πi) ∫_{Re z = c} A^{w0+z} γ(w0+z) D(w0+z) x^z dz/z
// with D a finite Dirichlet series (or 1), evaluated by the trapezoid rule
// on z = c + ijh.

#include "critval/eval/lfunction.hpp"

#include <optional>

namespace critval::eval {

/// γ(w) for a list of atoms; atoms whose shifts differ by whole periods
/// share one Γ evaluation and a rising product.
class GammaEval {
 public:
  explicit GammaEval(const std::vector<arch::GammaAtom>& atoms);
  Complex operator()(const Complex& w) const;

 private:
  struct Group {
    arch::GammaAtom::Kind kind;
    mpq_class base;
    std::vector<long> offsets;
  };
  std::vector<Group> groups_;
  long nC_ = 0, nR_ = 0;
  mpq_class sumC_ = 0, sumR_ = 0;
};

struct LineProblem {
  const std::vector<arch::GammaAtom>* atoms = nullptr;
  double log10A = 0;
  double re_w0 = 0;
  double log10x = 0;
  int d = 0;  // Ramanujan degree of D; 0 means D = 1
  double log10_tau = -50;  // absolute target
  double c_min = 0.5;
  bool symmetric = false;

  double log10_gamma(double sigma, double t) const;
  double log10_zeta_bound(double sigma) const;
  /// log10 of a bound for |integrand| at Re w = sigma, Im w = t.
  double log10_integrand(double sigma, double t) const;
  double min_arg() const;
};

struct LinePlan {
  std::size_t M = 0;
  double sigma = 0;
  double c = 0;
  double a = 0;
  double h = 0;
  double Y = 0;
  long nodes = 0;
  int work_digits = 0;
  double log10_scale = 0;
  double cost = 0;
};

struct LineData {
  const CoefficientSource* coeffs = nullptr;
  bool conjugate = false;
  Complex w0;
  Real lnA;
  Real lnx;
  std::vector<std::pair<long, std::vector<Complex>>> restored;
  mutable std::size_t nodes_out = 0;
};

std::optional<LinePlan> plan_line(const LineProblem& pb, std::size_t M);
LinePlan choose_plan(const LineProblem& pb, std::size_t M_fixed, std::size_t M_avail);
Complex run_line(const LineProblem& pb, const LinePlan& plan, const LineData& data);

/// Numeric L_p(X)^{-1} coefficients of the restored factors.
std::vector<std::pair<long, std::vector<Complex>>> restored_numeric(const LFunctionSpec& L, bool conjugate);
/// log10 |A^s γ(s)| at low precision.
double log10_gamma_scale(const LFunctionSpec& L, const Complex& s);

/// Contour-quadrature split (independent of the kernel expansion).
SplitValue split_terms_line(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                            double log10_tau);

/// Kernel expansion when available, contour quadrature otherwise.
SplitValue split_terms_target(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                              double log10_tau);

}  // namespace critval::eval
