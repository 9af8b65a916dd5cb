#include "kernel.hpp"

#include "plan.hpp"
#include "critval/numeric/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace critval::eval {

using arch::GammaAtom;
using num::Laurent;
using num::PrecisionScope;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Γ(y + 1 + v) ↦ Γ(y + v) = Γ(y + 1 + v) / (y + v).
void step_down(Laurent& g, const mpq_class& y) {
  if (y == 0) {
    --g.val;
    return;
  }
  const Real yr(y);
  Real prev(0);
  for (auto& c : g.c) {
    c -= prev;
    c /= yr;
    prev = c;
  }
}

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

// Walks the poles w_j = −β − j of one class and yields the residue
// coefficients C_{j,a} of γ(s+z) t^{−z}/z (times t^{−(s+β+j)} (ln t)^{−a}).
class PoleWalk {
 public:
  // merge_j: index of the pole sitting at z = 0, where 1/z joins the walk.
  bool init(const std::vector<GammaAtom>& atoms, const mpq_class& beta, const Complex& s, std::size_t len,
            long merge_j = -1) {
    beta_ = beta;
    s_ = s;
    len_ = len;
    merge_j_ = merge_j;
    Real lnS(0), E(0);
    const Real ln2pi = log(num::const_pi() * 2), lnpi = log(num::const_pi());
    for (const auto& a : atoms) {
      State st;
      st.kind = a.kind;
      st.x = a.shift - beta;
      if (a.kind == GammaAtom::C) {
        mpq_class tw = st.x * 2;
        if (!is_integer(tw)) return false;
        st.seq[0] = num::gamma_laurent(tw.get_num().get_si(), len);
        lnS += num::const_log2() - Real(st.x) * ln2pi;
        E += ln2pi;
      } else {
        if (!is_integer(st.x)) return false;
        long x0 = st.x.get_num().get_si();
        st.seq[0] = num::gamma_laurent(x0, len);
        st.seq[1] = num::gamma_laurent(x0 - 1, len);
        lnS -= Real(st.x) * lnpi / 2;
        E += lnpi / 2;
      }
      states_.push_back(std::move(st));
    }
    S_ = exp(lnS);
    rho_ = exp(E);
    num::Series e(len, Real(0));
    if (len > 1) e[1] = -E;
    eser_ = num::series_exp(e, len);
    return true;
  }

  // Coefficients for a = 0..m−1 at the current pole (empty when regular).
  std::vector<Complex> next() {
    Laurent prod{0, num::Series(len_, Real(0))};
    prod.c[0] = Real(1);
    for (auto& st : states_) {
      if (st.kind == GammaAtom::C) {
        prod = num::laurent_mul(prod, st.seq[0], len_);
      } else {
        Laurent x = st.seq[j_ % 2];
        Real scale = num::pow(Real(2), static_cast<long>(-x.val));
        for (auto& c : x.c) {
          c *= scale;
          scale /= 2;
        }
        prod = num::laurent_mul(prod, x, len_);
      }
    }
    prod = num::laurent_mul(prod, Laurent{0, eser_}, len_);
    std::vector<Complex> out;
    if (j_ == merge_j_) {
      --prod.val;
      const int m = -prod.val;
      Real fact(1);
      for (int a = 0; a < m; ++a) {
        if (a > 0) fact *= a;
        Complex c = prod.c.at(static_cast<std::size_t>(m - 1 - a)) * S_ / fact;
        out.push_back((a & 1) ? -c : c);
      }
      advance();
      return out;
    }
    const int m = -prod.val;
    if (m > 0) {
      Complex z = Complex(Real(-beta_ - j_)) - s_;
      Complex zinv = Complex(1) / z;
      std::vector<Complex> zp(m);
      zp[0] = zinv;
      for (int b = 1; b < m; ++b) zp[b] = zp[b - 1] * zinv;
      auto g = [&](int i) { return prod.c.at(static_cast<std::size_t>(i + m)) * S_; };
      Real fact(1);
      for (int a = 0; a < m; ++a) {
        if (a > 0) fact *= a;
        Complex acc(0);
        for (int b = 0; b + a < m; ++b) {
          Complex term = zp[b] * g(-1 - a - b);
          if (b & 1)
            acc -= term;
          else
            acc += term;
        }
        acc /= fact;
        out.push_back((a & 1) ? -acc : acc);
      }
    }
    advance();
    return out;
  }

 private:
  struct State {
    GammaAtom::Kind kind = GammaAtom::R;
    mpq_class x;  // x_j = w_j + shift
    Laurent seq[2];
  };

  void advance() {
    for (auto& st : states_) {
      if (st.kind == GammaAtom::C) {
        step_down(st.seq[0], st.x - 1);
      } else {
        step_down(st.seq[j_ % 2], st.x / 2 - 1);
      }
      st.x -= 1;
    }
    S_ *= rho_;
    ++j_;
  }

  mpq_class beta_;
  Complex s_;
  std::size_t len_ = 1;
  std::vector<State> states_;
  Real S_, rho_;
  num::Series eser_;
  long j_ = 0;
  long merge_j_ = -1;
};

struct ClassKey {
  mpq_class beta;
  std::size_t len;
};

std::vector<ClassKey> pole_classes(const std::vector<GammaAtom>& atoms) {
  std::map<mpq_class, ClassKey> by_frac;
  for (const auto& a : atoms) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), a.shift.get_num_mpz_t(), a.shift.get_den_mpz_t());
    mpq_class frac = a.shift - mpq_class(fl);
    auto it = by_frac.find(frac);
    if (it == by_frac.end()) {
      by_frac.emplace(frac, ClassKey{a.shift, 1});
    } else {
      it->second.beta = std::min(it->second.beta, a.shift);
      ++it->second.len;
    }
  }
  std::vector<ClassKey> out;
  for (auto& [f, k] : by_frac) out.push_back(k);
  return out;
}

double log10c(const Complex& z) { return abs(z).log10_abs(); }

}  // namespace

std::optional<KernelSeries> KernelSeries::build(const std::vector<GammaAtom>& atoms, const Complex& s_in, double t_lo,
                                                double t_hi, double log10_tau) {
  const double lt_lo = std::log10(t_lo), lt_hi = std::log10(t_hi);
  const double lnl = std::max({0.0, std::log10(std::abs(std::log(t_lo)) + 1e-300),
                               std::log10(std::abs(std::log(t_hi)) + 1e-300)});
  auto classes = pole_classes(atoms);
  // When s + β + j = 0 the 1/z pole coincides with a gamma pole (s in the
  // pole lattice of γ, which happens for 1 − s at many critical points).
  std::vector<long> merge(classes.size(), -1);
  bool merged = false;
  if (s_in.im.is_zero()) {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const double d = s_in.re.to_double() + classes[k].beta.get_d();
      const long j0 = -std::lround(d);
      if (j0 < 0) continue;
      if ((s_in.re + Real(classes[k].beta) + Real(j0)).is_zero()) {
        merge[k] = j0;
        ++classes[k].len;
        merged = true;
      }
    }
  }
  // Magnitude pass at low precision: number of poles and the largest term.
  std::vector<long> J(classes.size(), 0);
  double peak_all;
  {
    PrecisionScope scope = PrecisionScope::bits(64);
    Complex s = s_in;
    peak_all = merged ? kNegInf : log10c(GammaEval(atoms)(s));
    for (std::size_t k = 0; k < classes.size(); ++k) {
      PoleWalk walk;
      if (!walk.init(atoms, classes[k].beta, s, classes[k].len, merge[k])) return std::nullopt;
      const double re_sb = s.re.to_double() + classes[k].beta.get_d();
      double peak = kNegInf;
      int quiet = 0;
      for (long j = 0;; ++j) {
        if (j > 20000) return std::nullopt;
        auto c = walk.next();
        if (c.empty()) continue;
        double lm = kNegInf;
        for (std::size_t a = 0; a < c.size(); ++a) lm = std::max(lm, log10c(c[a]) + a * lnl);
        double mag = lm + std::max((j + re_sb) * lt_hi, (j + re_sb) * lt_lo);
        peak = std::max(peak, mag);
        if (mag < log10_tau - 3 && mag < peak - 2 && j >= static_cast<long>(classes[k].len)) {
          if (++quiet >= 3) break;
        } else {
          quiet = 0;
          J[k] = j + 1;
        }
      }
      J[k] = std::max(J[k], merge[k] + 1);
      peak_all = std::max(peak_all, peak);
    }
  }
  KernelSeries ks;
  long jtot = 0;
  for (long j : J) jtot += j;
  ks.log10_tau_ = log10_tau;
  ks.work_digits_ = std::max(20, static_cast<int>(std::ceil(peak_all - log10_tau)) + 10 +
                                     static_cast<int>(std::ceil(std::log10(jtot + 2.0))));
  ks.bits_ = num::digits_to_bits(ks.work_digits_) + 32;
  PrecisionScope scope = PrecisionScope::bits(ks.bits_);
  Complex s = s_in;
  s.round_to(ks.bits_);
  ks.g0_ = merged ? Complex(0) : GammaEval(atoms)(s);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    Class cl;
    cl.s_beta = s + Complex(Real(classes[k].beta));
    cl.re_s_beta = cl.s_beta.re.to_double();
    cl.c.assign(classes[k].len, std::vector<Complex>(J[k], Complex(0)));
    cl.lm.assign(J[k], kNegInf);
    PoleWalk walk;
    walk.init(atoms, classes[k].beta, s, classes[k].len, merge[k]);
    for (long j = 0; j < J[k]; ++j) {
      auto c = walk.next();
      for (std::size_t a = 0; a < c.size(); ++a) {
        cl.c[a][j] = c[a];
        cl.lm[j] = std::max(cl.lm[j], log10c(c[a]));
      }
    }
    ks.classes_.push_back(std::move(cl));
  }
  return ks;
}

std::size_t KernelSeries::length() const {
  std::size_t n = 0;
  for (const auto& c : classes_) n += c.lm.size();
  return n;
}

Complex KernelSeries::operator()(const Real& t) const {
  PrecisionScope scope = PrecisionScope::bits(bits_);
  return eval(t, log(t));
}

Complex KernelSeries::eval(const Real& t, const Real& ln_t) const {
  PrecisionScope scope = PrecisionScope::bits(bits_);
  const double lt = ln_t.to_double() / M_LN10;
  const double lnl = std::max(0.0, std::log10(std::abs(ln_t.to_double()) + 1e-300));
  const double thr = log10_tau_ - 3;
  Complex total = g0_;
  for (const auto& cl : classes_) {
    const double amax = static_cast<double>(cl.c.size() - 1);
    std::size_t Jt = 0;
    for (std::size_t j = cl.lm.size(); j-- > 0;) {
      if (cl.lm[j] + amax * lnl + (static_cast<double>(j) + cl.re_s_beta) * lt >= thr) {
        Jt = j + 1;
        break;
      }
    }
    if (Jt == 0) continue;
    Complex acc(0), H;
    Real lpow(1);
    for (std::size_t a = 0; a < cl.c.size(); ++a) {
      H = Complex(0);
      for (std::size_t j = Jt; j-- > 0;) {
        H *= t;
        H += cl.c[a][j];
      }
      if (a > 0) lpow *= ln_t;
      acc += H * lpow;
    }
    total += exp(cl.s_beta * ln_t) * acc;
  }
  return total;
}

double kernel_log10_bound(const std::vector<GammaAtom>& atoms, double re_s, double t) {
  LineProblem pb;
  pb.atoms = &atoms;
  double smin = 1e300;
  for (const auto& a : atoms) smin = std::min(smin, a.shift.get_d());
  if (atoms.empty()) smin = 0;
  const double c0 = std::max(0.05, -(re_s + smin) + 0.05);
  const double lt = std::log10(t);
  double best = std::numeric_limits<double>::infinity();
  for (double c = c0; c < c0 + 1e5; c += std::max(0.05, 0.02 * c)) {
    double v = -c * lt + pb.log10_gamma(re_s + c, 0) + std::log10(2 + 1 / c);
    if (v < best)
      best = v;
    else if (v > best + 30)
      break;
  }
  return best + 1;
}

namespace {

// log10 of a bound for d_deg(n) ≤ d(n)^{deg−1}.
double log10_divisor_bound(int deg, double n) {
  if (deg <= 1 || n < 3) return deg > 1 ? (deg - 1) * std::log10(2.0) : 0;
  double ln = std::log(n);
  double log2d = 1.5379 * ln / std::log(std::max(ln, 2.0));
  return (deg - 1) * log2d * std::log10(2.0);
}

std::size_t half_terms(const LFunctionSpec& L, double re_w, double tscale, double log10_tau) {
  const double log10A = 0.5 * std::log10(static_cast<double>(L.conductor));
  const int deg = L.ramanujan_degree;
  auto term = [&](double n) {
    return log10_divisor_bound(deg, n) + re_w * (log10A - std::log10(n)) +
           kernel_log10_bound(L.gamma, re_w, n * tscale) + std::log10(n);
  };
  double last_fail = 0;
  for (double n = 1; n < 1e10; n = std::max(n + 1, std::floor(n * 1.1))) {
    if (term(n) >= log10_tau - 1) last_fail = n;
    if (n > 4 * last_fail + 16) break;
  }
  return static_cast<std::size_t>(std::ceil(last_fail * 1.1)) + 1;
}

}  // namespace

std::size_t kernel_terms(const LFunctionSpec& L, const Complex& s, double x, double log10_tau) {
  const double A = std::sqrt(static_cast<double>(L.conductor));
  const double re = s.re.to_double();
  return std::max(half_terms(L, re, 1 / (A * x), log10_tau), half_terms(L, 1 - re, x / A, log10_tau));
}

std::size_t required_terms(const LFunctionSpec& L, const Complex& s, int digits, double x) {
  EvalOptions o;
  double tau = log10_gamma_scale(L, s) - 3 - (digits + o.guard);
  return kernel_terms(L, s, x, tau);
}

std::vector<Complex> full_coefficients(const LFunctionSpec& L, std::size_t M, mpfr_prec_t bits, bool conjugate) {
  PrecisionScope scope = PrecisionScope::bits(bits);
  auto part = L.coeffs->get(M, bits);
  std::vector<Complex> b(part->begin(), part->begin() + static_cast<long>(std::min(M + 1, part->size())));
  b.resize(M + 1, Complex(0));
  for (const auto& [p, poly] : restored_numeric(L, false)) {
    std::vector<Complex> ser{Complex(1)};
    for (std::size_t q = p; q <= M; q *= p) {
      std::size_t e = ser.size();
      Complex v(0);
      for (std::size_t i = 1; i <= e && i < poly.size(); ++i) v -= poly[i] * ser[e - i];
      ser.push_back(v);
      if (q > M / p) break;
    }
    for (std::size_t n = M; n >= 1; --n) {
      if (n % p != 0) continue;
      Complex acc = b[n];
      std::size_t q = n;
      for (std::size_t e = 1; q % p == 0; ++e) {
        q /= p;
        acc += ser[e] * b[q];
      }
      b[n] = acc;
    }
  }
  if (conjugate)
    for (auto& v : b) v = conj(v);
  return b;
}

SplitValue split_terms_kernel(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                              double log10_tau) {
  if (!L.coeffs) throw std::logic_error("L-function has no coefficients");
  SplitValue sv;
  const double x = opt.x;
  const double A = std::sqrt(static_cast<double>(L.conductor));
  const double log10A = std::log10(A);
  const std::size_t avail = L.coeffs->available();
  std::size_t M;
  if (opt.terms > 0) {
    M = std::min(opt.terms, avail);
  } else {
    M = kernel_terms(L, s, x, log10_tau);
    if (M > avail)
      throw InsufficientTerms("not enough coefficients for the requested precision: have " + std::to_string(avail) +
                                  ", need about " + std::to_string(M),
                              M);
  }
  M = std::max<std::size_t>(M, 1);
  const double lM = std::log10(static_cast<double>(M));
  const double dl = log10_divisor_bound(L.ramanujan_degree, static_cast<double>(M));
  auto ktau = [&](double re_w) { return log10_tau - lM - dl - re_w * log10A - std::max(0.0, -re_w * lM) - 1; };
  const Complex one_minus_s = Complex(1) - s;
  const double re_s = s.re.to_double();
  auto kp = KernelSeries::build(L.gamma, s, 1 / (A * x), M / (A * x), ktau(re_s));
  if (!kp) return sv;
  auto kq = KernelSeries::build(L.gamma, one_minus_s, x / A, M * x / A, ktau(1 - re_s));
  if (!kq) return sv;
  const mpfr_prec_t bits = std::max(kp->bits(), kq->bits());
  const auto bp = full_coefficients(L, M, bits, dual);
  const auto bq = full_coefficients(L, M, bits, !dual);
  {
    PrecisionScope scope = PrecisionScope::bits(bits);
    const Real lnA = log(Real(L.conductor)) / 2;
    const Real lnx = log(Real(x));
    Complex sp = s, sq = one_minus_s;
    Complex P(0), Q(0);
    for (std::size_t n = 1; n <= M; ++n) {
      const bool zp = bp[n].is_zero(), zq = bq[n].is_zero();
      if (zp && zq) continue;
      Real t(static_cast<long>(n));
      Real ln = log(t);
      Real d = lnA - ln;
      if (!zp) {
        Real lt = -d - lnx;
        P += bp[n] * exp(sp * d) * kp->eval(exp(lt), lt);
      }
      if (!zq) {
        Real lt = -d + lnx;
        Q += bq[n] * exp(sq * d) * kq->eval(exp(lt), lt);
      }
    }
    sv.P = P;
    sv.Q = Q;
    sv.polar = Complex(0);
    for (const auto& p : L.poles) {
      Complex dd = Complex(Real(p.location)) - s;
      sv.polar += pow(Real(x), dd) * Real(p.residue) / dd;
    }
  }
  const mpfr_prec_t out_bits = num::digits_to_bits(opt.digits + opt.guard) + 32;
  sv.P.round_to(out_bits);
  sv.Q.round_to(out_bits);
  sv.polar.round_to(out_bits);
  sv.terms = M;
  sv.work_digits = std::max(kp->work_digits(), kq->work_digits());
  sv.nodes = kp->length() + kq->length();
  return sv;
}

// ---------------------------------------------------------------------------
// Public kernel entry points

Complex mellin_kernel_residues(const std::vector<GammaAtom>& atoms, const Real& t, const Complex& s, int digits) {
  const double tt = t.to_double();
  const double tau = kernel_log10_bound(atoms, s.re.to_double(), tt) - digits - 5;
  auto ks = KernelSeries::build(atoms, s, tt, tt, tau);
  if (!ks) throw std::invalid_argument("mellin_kernel_residues: gamma shifts off the half-integer lattice");
  Complex v = (*ks)(t);
  v.round_to(num::digits_to_bits(digits + 10));
  return v;
}

Complex mellin_kernel_quadrature(const std::vector<GammaAtom>& atoms, const Real& t, const Complex& s, int digits) {
  LineProblem pb;
  pb.atoms = &atoms;
  pb.log10A = 0;
  pb.re_w0 = s.re.to_double();
  pb.log10x = -std::log10(t.to_double());
  pb.d = 0;
  pb.log10_tau = kernel_log10_bound(atoms, s.re.to_double(), t.to_double()) - digits - 5;
  LinePlan plan = choose_plan(pb, 0, 0);
  LineData data;
  {
    PrecisionScope scope = PrecisionScope::bits(num::digits_to_bits(plan.work_digits) + 16);
    data.w0 = s;
    data.lnA = Real(0);
    data.lnx = -log(t);
  }
  Complex v = run_line(pb, plan, data);
  v.round_to(num::digits_to_bits(digits + 10));
  return v;
}

Complex mellin_kernel(const std::vector<GammaAtom>& atoms, const Real& t, const Complex& s, int digits) {
  const double tt = t.to_double();
  const double tau = kernel_log10_bound(atoms, s.re.to_double(), tt) - digits - 5;
  if (auto ks = KernelSeries::build(atoms, s, tt, tt, tau)) return (*ks)(t);
  return mellin_kernel_quadrature(atoms, t, s, digits);
}

double kernel_crossover_check(const std::vector<GammaAtom>& atoms, const Complex& s, int digits, double lo, double hi,
                              int samples) {
  double worst = kNegInf;
  for (int i = 0; i < samples; ++i) {
    double tt = samples == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
    PrecisionScope scope(digits + 20);
    Real t(tt);
    Complex a = mellin_kernel_residues(atoms, t, s, digits);
    Complex b = mellin_kernel_quadrature(atoms, t, s, digits);
    Real scale = max(abs(a), num::pow10(static_cast<long>(
                                 std::floor(kernel_log10_bound(atoms, s.re.to_double(), tt)))));
    double r = (abs(a - b) / scale).log10_abs();
    if (!std::isfinite(r)) r = -(digits + 10);
    worst = std::max(worst, r);
  }
  if (worst > -(digits - 5))
    throw KernelCrossoverFailure("residue and quadrature kernels disagree: 1e" + std::to_string(std::lround(worst)));
  return worst;
}

Complex completed_via_kernels(const LFunctionSpec& L, const Complex& s, int digits) {
  if (!L.root_number) throw std::logic_error("completed_via_kernels: root number unknown");
  EvalOptions o;
  o.digits = digits;
  PrecisionScope scope(digits + 40);
  double tau = log10_gamma_scale(L, s) - 3 - (digits + o.guard);
  SplitValue v = split_terms_kernel(L, s, o, false, tau);
  if (v.terms == 0) throw std::invalid_argument("completed_via_kernels: gamma shifts off the half-integer lattice");
  return v.P + *L.root_number * v.Q - v.polar;
}

}  // namespace critval::eval
