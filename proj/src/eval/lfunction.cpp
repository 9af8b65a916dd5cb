#include "critval/eval/lfunction.hpp"

#include "kernel.hpp"
#include "plan.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <complex>
#include <limits>
#include <sstream>

namespace critval::eval {

using arch::GammaAtom;
using num::PrecisionScope;

namespace {

mpfr_prec_t round_bits(mpfr_prec_t b) { return (b + 63) / 64 * 64; }

std::vector<long> smallest_prime_factors(std::size_t M) {
  std::vector<long> spf(M + 1, 0);
  for (std::size_t i = 2; i <= M; ++i)
    if (spf[i] == 0)
      for (std::size_t j = i; j <= M; j += i)
        if (spf[j] == 0) spf[j] = static_cast<long>(i);
  return spf;
}

// Numeric b_{p^e} from exact local data.
Complex local_numeric(const exact::NumberField& K, int emb, const exact::FieldElem& c, const euler::Twist& tw, long p,
                      long e, long weight) {
  if (c.is_zero() || tw.zero) return Complex(0);
  Complex v = K.embed(c, emb);
  if (tw.exponent != 0) v = v * Complex::root_of_unity(tw.exponent * e, tw.order);
  if (weight != 0) v = v / pow(sqrt(Real(p)), e * weight);
  return v;
}

}  // namespace

std::shared_ptr<const std::vector<Complex>> CoefficientSource::get(std::size_t M, mpfr_prec_t bits) const {
  bits = round_bits(bits);
  M = std::min(M, available());
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, vec] : cache_)
    if (key.first >= bits && key.second >= M) return vec;
  auto vec = std::make_shared<const std::vector<Complex>>(compute(M, bits));
  cache_[{bits, M}] = vec;
  return vec;
}

EulerProductSource::EulerProductSource(exact::FieldPtr field, int embedding, long motivic_weight, std::size_t M,
                                       std::vector<Prime> primes, bool real)
    : field_(std::move(field)), embedding_(embedding), weight_(motivic_weight), M_(M), primes_(std::move(primes)),
      real_(real) {}

const EulerProductSource::Prime* EulerProductSource::prime_data(long p) const {
  for (const auto& pr : primes_)
    if (pr.p == p) return &pr;
  return nullptr;
}

std::vector<Complex> EulerProductSource::compute(std::size_t M, mpfr_prec_t bits) const {
  PrecisionScope scope = PrecisionScope::bits(bits + 32);
  std::vector<Complex> pp(M + 1);
  for (const auto& pr : primes_) {
    if (static_cast<std::size_t>(pr.p) > M) break;
    long q = pr.p;
    for (long e = 1; static_cast<std::size_t>(q) <= M; ++e) {
      if (static_cast<std::size_t>(e) < pr.local.size())
        pp[q] = local_numeric(*field_, embedding_, pr.local[e], pr.twist, pr.p, e, weight_);
      if (q > static_cast<long>(M) / pr.p) break;
      q *= pr.p;
    }
  }
  auto spf = smallest_prime_factors(M);
  std::vector<Complex> b(M + 1);
  if (M >= 1) b[1] = Complex(1);
  for (std::size_t n = 2; n <= M; ++n) {
    long p = spf[n];
    std::size_t m = n, pe = 1;
    while (m % p == 0) {
      m /= p;
      pe *= p;
    }
    b[n] = m == 1 ? pp[pe] : pp[pe] * b[m];
  }
  for (auto& c : b) c.round_to(bits);
  return b;
}

LFunctionSpec build_lfunction(const mf::Newform& f, int r, const chars::DirichletCharacter& xi, std::size_t terms,
                              bool assume_functoriality, const std::vector<long>& omit) {
  if (r < 0) throw std::invalid_argument("build_lfunction: r must be >= 0");
  if (r >= 5 && !assume_functoriality)
    throw FunctorialityRequired("Sym^" + std::to_string(r) +
                                " is automorphic only conditionally (known for r <= 4); pass --assume-functoriality");
  if (terms < 10) throw std::invalid_argument("build_lfunction: need at least 10 terms");
  const auto xi0 = chars::primitivize(xi);
  const auto& K = *f.field;
  LFunctionSpec L;
  L.degree = r + 1;
  L.ramanujan_degree = r + 1;
  L.motivic_weight = static_cast<long>(r) * (f.weight - 1);
  L.gamma = arch::gamma_shifts(arch::sym_arch_parameter(f.weight, r, 0, xi0.is_even() ? 0 : 1));
  mpz_class bound = 1;
  for (int i = 0; i <= r; ++i) bound *= mpz_class(xi0.conductor()) * f.level;
  if (!bound.fits_slong_p() || bound > mpz_class("1000000000000"))
    throw std::invalid_argument("build_lfunction: conductor bound too large");
  L.conductor_bound = bound.get_si();
  L.conductor = L.conductor_bound;
  L.restored_field = f.field;
  L.restored_embedding = f.embedding;
  L.restored_weight = L.motivic_weight;

  std::vector<EulerProductSource::Prime> primes;
  for (long p : euler::primes_up_to(static_cast<long>(terms))) {
    EulerProductSource::Prime pr;
    pr.p = p;
    if (f.level % p == 0) {
      L.omitted_primes.push_back(p);
      pr.local = {K.one()};
      primes.push_back(std::move(pr));
      continue;
    }
    pr.twist = euler::Twist::from_character(xi0, p);
    if (pr.twist.zero) {
      // ramified twist of an unramified factor: the local factor is 1
      L.omitted_primes.push_back(p);
      pr.local = {K.one()};
      primes.push_back(std::move(pr));
      continue;
    }
    exact::FieldElem ap = K.zero(), det = K.one();
    if (r > 0) {
      if (static_cast<std::size_t>(p) > f.coefficient_count())
        throw InsufficientTerms("build_lfunction: a_p missing for p = " + std::to_string(p) + " (have " +
                                    std::to_string(f.coefficient_count()) + " coefficients)",
                                terms);
      ap = f.a(p);
      det = f.hecke_det(p);
    }
    auto factor = euler::sym_euler_factor_exact(p, f.field, ap, det, r);
    int emax = 0;
    for (long q = 1; q <= static_cast<long>(terms) / p; q *= p) ++emax;
    if (std::find(omit.begin(), omit.end(), p) != omit.end()) {
      L.omitted_primes.push_back(p);
      L.restored.push_back({p, factor.coeffs, pr.twist});
      pr.local = {K.one()};
    } else {
      pr.local = factor.inverse_series(emax + 1);
    }
    primes.push_back(std::move(pr));
  }
  bool real_emb = K.embeddings().at(f.embedding).im.is_zero();
  bool real = real_emb && xi0.order() <= 2;
  L.coeffs = std::make_shared<EulerProductSource>(f.field, f.embedding, L.motivic_weight, terms, std::move(primes), real);
  if (r == 0 && xi0.is_trivial() && f.level == 1) L.poles = {{1, 1}, {0, -1}};
  std::string label = f.label.empty() ? "form" : f.label;
  L.id = label + ".sym" + std::to_string(r) + (xi0.is_trivial() ? "" : "." + xi0.label());
  for (long p : omit) L.id += ".omit" + std::to_string(p);
  std::ostringstream prov;
  prov << "L(s, Sym^" << r << " " << label << (xi0.is_trivial() ? "" : " x " + xi0.label())
       << "), analytic normalization (classical s = analytic s + " << L.motivic_weight << "/2), a_1 = 1 arithmetic "
       << "normalization, " << terms << " terms from the exact Euler product";
  if (!xi.is_primitive()) prov << ", twist replaced by its primitive character " << xi0.label();
  L.provenance = prov.str();
  return L;
}

LFunctionSpec zeta_spec(std::size_t terms) {
  LFunctionSpec L;
  L.id = "zeta";
  L.degree = 1;
  L.gamma = {{GammaAtom::R, 0}};
  L.coeffs = std::make_shared<FunctionSource>(terms, true, [](std::size_t M, mpfr_prec_t bits) {
    PrecisionScope scope = PrecisionScope::bits(bits);
    std::vector<Complex> b(M + 1, Complex(1));
    b[0] = Complex(0);
    return b;
  });
  L.poles = {{1, 1}, {0, -1}};
  L.provenance = "Riemann zeta";
  return L;
}

// ---------------------------------------------------------------------------
// Gamma factors

bool is_gamma_pole(const std::vector<GammaAtom>& atoms, const Complex& s) {
  if (!s.im.is_zero() && std::abs(s.im.to_double()) > 1e-30) return false;
  for (const auto& a : atoms) {
    double z = s.re.to_double() + a.shift.get_d();
    double rz = std::round(z);
    if (std::abs(z - rz) > 1e-25 || rz > 0) continue;
    if (a.kind == GammaAtom::C) return true;
    if (static_cast<long>(rz) % 2 == 0) return true;
  }
  return false;
}

GammaEval::GammaEval(const std::vector<GammaAtom>& atoms) {
  for (const auto& a : atoms) {
    mpq_class period = a.kind == GammaAtom::C ? 1 : 2;
    bool placed = false;
    for (auto& g : groups_) {
      if (g.kind != a.kind) continue;
      mpq_class d = (a.shift - g.base) / period;
      if (d.get_den() != 1) continue;
      if (d < 0) {
        long k = -d.get_num().get_si();
        for (auto& m : g.offsets) m += k;
        g.base = a.shift;
        g.offsets.push_back(0);
      } else {
        g.offsets.push_back(d.get_num().get_si());
      }
      placed = true;
      break;
    }
    if (!placed) groups_.push_back({a.kind, a.shift, {0}});
    if (a.kind == GammaAtom::C) {
      ++nC_;
      sumC_ += a.shift;
    } else {
      ++nR_;
      sumR_ += a.shift;
    }
  }
  for (auto& g : groups_) std::sort(g.offsets.begin(), g.offsets.end());
}

Complex GammaEval::operator()(const Complex& w) const {
  const mpfr_prec_t bits = num::working_bits();
  PrecisionScope scope = PrecisionScope::bits(bits + 24);
  // 2^{nC} (2π)^{−(nC w + ΣC)} π^{−(nR w + ΣR)/2}
  Real ln2pi = log(num::const_pi() * 2), lnpi = log(num::const_pi());
  Complex e = Complex(Real(nC_) * num::const_log2());
  e -= (w * Real(nC_) + Complex(Real(sumC_))) * ln2pi;
  e -= (w * Real(nR_) + Complex(Real(sumR_))) * lnpi / 2;
  Complex out = exp(e);
  for (const auto& g : groups_) {
    Complex arg = g.kind == GammaAtom::C ? w + Complex(Real(g.base)) : (w + Complex(Real(g.base))) / 2;
    Complex base = num::gamma(arg);
    long at = 0;
    Complex run = base;
    for (long m : g.offsets) {
      for (; at < m; ++at) {
        run *= arg;
        arg.re += Real(1);
      }
      out *= run;
    }
  }
  out.round_to(bits);
  return out;
}

Complex gamma_factor(const std::vector<GammaAtom>& atoms, const Complex& s) { return GammaEval(atoms)(s); }

// ---------------------------------------------------------------------------
// Planning (double precision magnitudes)

namespace {

double lgamma_abs(double x, double y) {
  // log|Γ(x+iy)| via Stirling after shifting to |z| ≥ 10.
  std::complex<double> z(x, y), acc(0, 0);
  while (std::abs(z) < 10) {
    acc -= std::log(z);
    z += 1.0;
  }
  std::complex<double> st = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * M_PI) + 1.0 / (12.0 * z) -
                            1.0 / (360.0 * z * z * z);
  return (st + acc).real();
}

}  // namespace

double LineProblem::log10_gamma(double sigma, double t) const {
  double out = 0;
  for (const auto& a : *atoms) {
    double x = sigma + a.shift.get_d();
    if (a.kind == GammaAtom::C)
      out += std::log10(2.0) - x * std::log10(2 * M_PI) + lgamma_abs(x, t) / M_LN10;
    else
      out += -x / 2 * std::log10(M_PI) + lgamma_abs(x / 2, t / 2) / M_LN10;
  }
  return out;
}

double LineProblem::log10_zeta_bound(double sigma) const {
  if (d == 0) return 0;
  return d * std::log10(1 + std::pow(2.0, -sigma) + std::pow(2.0, 1 - sigma) / (sigma - 1));
}

double LineProblem::log10_integrand(double sigma, double t) const {
  double c = sigma - re_w0;
  return sigma * log10A + log10_gamma(sigma, t) + log10_zeta_bound(sigma) + c * log10x -
         0.5 * std::log10(c * c + t * t);
}

double LineProblem::min_arg() const {
  double m = 1e300;
  for (const auto& a : *atoms) m = std::min(m, a.shift.get_d());
  return atoms->empty() ? 0 : m;
}

std::optional<LinePlan> plan_line(const LineProblem& pb, std::size_t M) {
  LinePlan plan;
  plan.M = M;
  const double shift_min = pb.min_arg();
  double sigma_lo = std::max({pb.re_w0 + pb.c_min, 0.75 - shift_min, pb.d > 0 ? 2.5 : -1e300});
  double sigma = sigma_lo;
  if (pb.d > 0) {
    const double lm = std::log10(static_cast<double>(std::max<std::size_t>(M, 2)));
    bool ok = false;
    for (; sigma < sigma_lo + 600; sigma += 0.25) {
      double err = (2 - sigma) * lm + pb.d * std::log10(1.6449341) + pb.log10_integrand(sigma, 0) -
                   pb.log10_zeta_bound(sigma) + 1.5;
      if (err <= pb.log10_tau) {
        ok = true;
        break;
      }
    }
    if (!ok) return std::nullopt;
  } else {
    double best = 1e300, arg = sigma_lo;
    for (double sg = sigma_lo; sg < sigma_lo + 200; sg += 0.25) {
      double v = pb.log10_integrand(sg, 0);
      if (v < best) {
        best = v;
        arg = sg;
      }
    }
    sigma = arg;
  }
  plan.sigma = sigma;
  plan.c = sigma - pb.re_w0;
  const double logS = pb.log10_integrand(sigma, 0);
  plan.log10_scale = logS;
  // Trapezoid step from the strip half-width a.
  double best_h = 0, best_a = 0;
  for (double frac : {0.25, 0.5, 0.75}) {
    double a = frac * plan.c;
    if (sigma - a + shift_min < 0.25) continue;
    if (pb.d > 0 && sigma - a < 2) continue;
    double right = pb.log10_integrand(sigma + a, 0) + (a * pb.log10x);
    double left = pb.log10_integrand(sigma - a, 0) - (a * pb.log10x);
    double lm = std::max(right, left) + 1;
    double h = 2 * M_PI * a / M_LN10 / (lm - pb.log10_tau + 1);
    if (h > best_h) {
      best_h = h;
      best_a = a;
    }
  }
  if (best_h <= 0) {
    best_a = std::min(0.5 * plan.c, std::max(0.1, sigma + shift_min - 0.25));
    best_h = 2 * M_PI * best_a / M_LN10 / (logS + 2 - pb.log10_tau);
  }
  plan.a = best_a;
  plan.h = best_h;
  // Truncation height.
  double thresh = pb.log10_tau - std::log10(plan.h / (2 * M_PI)) - 3;
  double Y = 0;
  while (pb.log10_integrand(sigma, Y) > thresh && Y < 1e5) Y += std::max(1.0, Y * 0.05);
  plan.Y = Y;
  plan.nodes = static_cast<long>((pb.symmetric ? 1 : 2) * Y / plan.h) + 1;
  plan.work_digits = static_cast<int>(std::ceil(std::max(logS, pb.log10_tau) - pb.log10_tau)) + 10 +
                     static_cast<int>(std::ceil(std::log10(plan.nodes + 1.0)));
  const double wd = plan.work_digits;
  plan.cost = plan.nodes * (static_cast<double>(M) + 40.0 * pb.atoms->size()) * std::pow(wd, 1.6);
  return plan;
}

LinePlan choose_plan(const LineProblem& pb, std::size_t M_fixed, std::size_t M_avail) {
  std::optional<LinePlan> best;
  std::vector<std::size_t> cands;
  if (pb.d == 0) {
    cands = {0};
  } else if (M_fixed > 0) {
    cands = {std::min(M_fixed, M_avail)};
  } else {
    for (std::size_t M = 50; M < M_avail; M *= 2) cands.push_back(M);
    cands.push_back(M_avail);
  }
  for (auto M : cands) {
    auto p = plan_line(pb, M);
    if (p && (!best || p->cost < best->cost)) best = p;
  }
  if (!best) {
    // Report the smallest M that would be feasible.
    std::size_t M = std::max<std::size_t>(M_avail, 50);
    for (int i = 0; i < 40 && !plan_line(pb, M); ++i) M *= 2;
    throw InsufficientTerms("not enough coefficients for the requested precision: have " + std::to_string(M_avail) +
                                ", need about " + std::to_string(M),
                            M);
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Line integrals

Complex run_line(const LineProblem& pb, const LinePlan& plan, const LineData& data) {
  const mpfr_prec_t bits = num::digits_to_bits(plan.work_digits) + 16;
  PrecisionScope scope = PrecisionScope::bits(bits);
  const GammaEval gam(*pb.atoms);
  const Real h(plan.h);
  const Real c(plan.c);
  const Complex w0 = data.w0;
  const Real lnA = data.lnA;
  const Real lnx = data.lnx;
  const std::size_t M = plan.M;
  const bool use_d = pb.d > 0;
  const bool symmetric = pb.symmetric;

  // n^{−(w0 + c)} b_n and the rotation n^{−ih}.
  std::vector<std::size_t> idx;
  std::vector<Complex> cur, rot;
  Real dbound(1);
  if (use_d) {
    auto b = data.coeffs->get(M, bits);
    auto spf = smallest_prime_factors(M);
    std::vector<Complex> pw(M + 1), rt(M + 1);
    Complex w1 = w0 + Complex(c);
    pw[1] = Complex(1);
    rt[1] = Complex(1);
    for (std::size_t n = 2; n <= M; ++n) {
      std::size_t p = spf[n];
      if (p == n) {
        Real ln = log(Real(static_cast<long>(n)));
        pw[n] = exp(-(w1 * ln));
        rt[n] = Complex::unit(-(h * ln));
      } else {
        pw[n] = pw[p] * pw[n / p];
        rt[n] = rt[p] * rt[n / p];
      }
    }
    for (std::size_t n = 1; n <= M; ++n) {
      const Complex& bn = (*b)[n];
      if (bn.is_zero()) continue;
      idx.push_back(n);
      cur.push_back((data.conjugate ? conj(bn) : bn) * pw[n]);
      rot.push_back(rt[n]);
    }
    dbound = num::pow10(0);
    dbound = exp(Real(pb.log10_zeta_bound(plan.sigma) * M_LN10));
  }
  // Numeric restored factors Σ_e c_e p^{−e w}.
  auto restored_at = [&](const Complex& w) {
    Complex prod(1);
    for (const auto& rf : data.restored) {
      Complex X = exp(-(w * log(Real(rf.first))));
      prod /= num::poly_eval(rf.second, X);
    }
    return prod;
  };

  const long j0 = symmetric ? 0 : std::lround(-data.w0.im.to_double() / plan.h);
  const Real tau = exp(Real(pb.log10_tau * M_LN10)) / 1000;
  const Real step = h / (num::const_pi() * 2);

  auto node = [&](long j, std::vector<Complex>& state, bool& stop) {
    Complex z(c, h * j);
    Complex w = w0 + z;
    Complex g = gam(w);
    Complex pre = exp(w * lnA + z * lnx);
    Complex coef = pre * g / z;
    Real bound = abs(coef) * dbound * step;
    if (bound < tau) {
      stop = true;
      return Complex(0);
    }
    Complex D(1);
    if (use_d) {
      D = Complex(0);
      for (const auto& v : state) D += v;
    }
    if (!data.restored.empty()) D *= restored_at(w);
    return coef * D;
  };

  Complex total(0);
  long count = 0;
  // upward from j0
  {
    std::vector<Complex> state = cur;
    if (j0 != 0)
      for (std::size_t i = 0; i < state.size(); ++i) state[i] *= pow(rot[i], j0);
    for (long j = j0;; ++j) {
      bool stop = false;
      Complex f = node(j, state, stop);
      if (stop && j > j0) break;
      ++count;
      if (symmetric && j > 0)
        total += Complex(f.re * 2);
      else if (symmetric)
        total += Complex(f.re);
      else
        total += f;
      for (std::size_t i = 0; i < state.size(); ++i) state[i] *= rot[i];
      if (count > 2000000) throw std::runtime_error("line integral did not converge");
    }
  }
  if (!symmetric) {
    std::vector<Complex> state = cur;
    std::vector<Complex> back(rot.size());
    for (std::size_t i = 0; i < rot.size(); ++i) back[i] = conj(rot[i]);
    for (std::size_t i = 0; i < state.size(); ++i) state[i] *= pow(rot[i], j0 - 1);
    for (long j = j0 - 1;; --j) {
      bool stop = false;
      Complex f = node(j, state, stop);
      if (stop) break;
      ++count;
      total += f;
      for (std::size_t i = 0; i < state.size(); ++i) state[i] *= back[i];
      if (count > 2000000) throw std::runtime_error("line integral did not converge");
    }
  }
  data.nodes_out = static_cast<std::size_t>(count);
  return total * step;
}

// ---------------------------------------------------------------------------
// Split evaluation

std::vector<std::pair<long, std::vector<Complex>>> restored_numeric(const LFunctionSpec& L, bool conjugate) {
  std::vector<std::pair<long, std::vector<Complex>>> out;
  for (const auto& rf : L.restored) {
    std::vector<Complex> c;
    for (std::size_t e = 0; e < rf.inverse_poly.size(); ++e) {
      Complex v = local_numeric(*L.restored_field, L.restored_embedding, rf.inverse_poly[e], rf.twist, rf.p,
                                static_cast<long>(e), L.restored_weight);
      if (e == 0) v = Complex(1);
      c.push_back(conjugate ? conj(v) : v);
    }
    out.emplace_back(rf.p, std::move(c));
  }
  return out;
}

namespace {

double log10_abs(const Complex& z) { return abs(z).log10_abs(); }

}  // namespace

// log10 |A^s γ(s)| at low precision.
double log10_gamma_scale(const LFunctionSpec& L, const Complex& s) {
  PrecisionScope scope = PrecisionScope::bits(64);
  Complex g = GammaEval(L.gamma)(s);
  return log10_abs(g) + s.re.to_double() * 0.5 * std::log10(static_cast<double>(L.conductor));
}

SplitValue split_terms_line(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                            double log10_tau) {
  if (!L.coeffs) throw std::logic_error("L-function has no coefficients");
  const mpfr_prec_t out_bits = num::digits_to_bits(opt.digits + opt.guard);
  SplitValue sv;
  const double log10A = 0.5 * std::log10(static_cast<double>(L.conductor));
  const bool real_coeffs = L.coeffs->real_coefficients();
  auto make = [&](const Complex& w0, double x, bool conjugate, bool invert) {
    LineProblem pb;
    pb.atoms = &L.gamma;
    pb.log10A = log10A;
    pb.re_w0 = w0.re.to_double();
    pb.log10x = invert ? -std::log10(x) : std::log10(x);
    pb.d = L.ramanujan_degree;
    pb.log10_tau = log10_tau;
    double cmin = 0.5;
    for (const auto& p : L.poles) cmin = std::max(cmin, p.location.get_d() - pb.re_w0 + 0.5);
    pb.c_min = cmin;
    pb.symmetric = w0.im.is_zero() && real_coeffs;
    LinePlan plan = choose_plan(pb, opt.terms, L.coeffs->available());
    LineData data;
    data.coeffs = L.coeffs.get();
    data.conjugate = conjugate;
    {
      PrecisionScope scope = PrecisionScope::bits(num::digits_to_bits(plan.work_digits) + 16);
      data.w0 = w0;
      data.w0.round_to(num::working_bits());
      data.lnA = log(Real(L.conductor)) / 2;
      data.lnx = log(Real(x));
      if (invert) data.lnx = -data.lnx;
      data.restored = restored_numeric(L, conjugate);
    }
    Complex v = run_line(pb, plan, data);
    sv.terms = std::max(sv.terms, plan.M);
    sv.work_digits = std::max(sv.work_digits, plan.work_digits);
    sv.nodes += data.nodes_out;
    return v;
  };
  Complex one_minus_s = Complex(1) - s;
  sv.P = make(s, opt.x, dual, false);
  sv.Q = make(one_minus_s, opt.x, !dual, true);
  PrecisionScope scope = PrecisionScope::bits(out_bits + 32);
  sv.polar = Complex(0);
  for (const auto& p : L.poles) {
    Complex d = Complex(Real(p.location)) - s;
    sv.polar += pow(Real(opt.x), d) * Real(p.residue) / d;
  }
  sv.P.round_to(out_bits + 32);
  sv.Q.round_to(out_bits + 32);
  return sv;
}

SplitValue split_terms_target(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual,
                              double log10_tau) {
  if (!opt.line_integral) {
    if (auto v = split_terms_kernel(L, s, opt, dual, log10_tau); v.terms > 0) return v;
  }
  return split_terms_line(L, s, opt, dual, log10_tau);
}

SplitValue split_terms(const LFunctionSpec& L, const Complex& s, const EvalOptions& opt, bool dual) {
  double tau = log10_gamma_scale(L, s) - 3 - (opt.digits + opt.guard);
  return split_terms_target(L, s, opt, dual, tau);
}

namespace {

Complex combine(const SplitValue& v, const Complex& eps) { return v.P + eps * v.Q - v.polar; }

void check_point(const LFunctionSpec& L, const Complex& s) {
  if (is_gamma_pole(L.gamma, s))
    throw GammaPole("s = " + s.to_string(10) +
                    " is a pole of the gamma factor; L_f has a trivial zero there and Lambda is evaluated elsewhere");
  for (const auto& p : L.poles)
    if (s.im.is_zero() && abs(s.re - Real(p.location)) < Real(1e-30))
      throw GammaPole("s = " + p.location.get_str() + " is a pole of the completed L-function");
}

}  // namespace

EvalResult evaluate(const LFunctionSpec& L, const Complex& s_in, const EvalOptions& opt, const CertifyOptions& cert) {
  if (!L.root_number) throw std::logic_error("evaluate: root number unknown; run solve_root_number first");
  check_point(L, s_in);
  const mpfr_prec_t out_bits = num::digits_to_bits(opt.digits + opt.guard);
  PrecisionScope scope = PrecisionScope::bits(out_bits + 32);
  Complex s = s_in;
  const Complex eps = *L.root_number;
  EvalResult r;
  r.s = s;
  double tau = log10_gamma_scale(L, s) - 3 - (opt.digits + opt.guard);
  SplitValue sv = split_terms_target(L, s, opt, false, tau);
  Complex lam = combine(sv, eps);
  Complex g = exp(s * log(Real(L.conductor)) / 2) * GammaEval(L.gamma)(s);
  Complex val = lam / g;
  // Small L(s): tighten the absolute target and redo once.
  double lv = log10_abs(val);
  if (lv < -3 && std::isfinite(lv)) {
    tau += std::max(lv, -static_cast<double>(opt.digits)) - 3;
    sv = split_terms_target(L, s, opt, false, tau);
    lam = combine(sv, eps);
    val = lam / g;
  }
  r.completed = lam;
  r.full_value = val;
  // Partial finite part: divide out the restored factors again.
  Complex part = val;
  for (const auto& [p, poly] : restored_numeric(L, false)) part *= num::poly_eval(poly, exp(-(s * log(Real(p)))));
  r.value = part;
  r.terms = sv.terms;
  r.work_digits = sv.work_digits;
  r.nodes = sv.nodes;
  Real scale = max(abs(lam), Real(1));
  double worst = -1e300;
  if (cert.functional_equation) {
    EvalOptions o2 = opt;
    o2.x = cert.fe_x;
    SplitValue dv = split_terms_target(L, Complex(1) - s, o2, true, tau);
    Complex lam_dual = combine(dv, conj(eps));
    r.fe_residual = (abs(lam - eps * lam_dual) / scale).log10_abs();
    if (!std::isfinite(r.fe_residual)) r.fe_residual = -(opt.digits + opt.guard);
    worst = std::max(worst, r.fe_residual);
  }
  if (cert.term_doubling) {
    EvalOptions o2 = opt;
    std::size_t avail = L.coeffs->available();
    // Compare with more terms; skipped when the source has no headroom.
    std::size_t M2 = std::min(2 * sv.terms, avail);
    if (M2 >= sv.terms + sv.terms / 8 + 1) {
      o2.terms = M2;
      SplitValue v2 = split_terms_target(L, s, o2, false, tau);
      r.doubling_residual = (abs(combine(v2, eps) - lam) / scale).log10_abs();
      if (!std::isfinite(r.doubling_residual)) r.doubling_residual = -(opt.digits + opt.guard);
      worst = std::max(worst, r.doubling_residual);
    } else {
      r.doubling_residual = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (worst == -1e300) worst = -(opt.digits + opt.guard);
  if (!std::isfinite(worst)) worst = -(opt.digits + opt.guard);
  r.certified_digits = static_cast<int>(std::floor(-worst));
  r.certified = r.certified_digits >= opt.digits;
  r.certified_digits = std::min(r.certified_digits, opt.digits + opt.guard);
  return r;
}

// ---------------------------------------------------------------------------
// Root number and conductor

namespace {

std::vector<long> divisors(long n) {
  std::vector<long> out;
  for (long d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

struct Solve {
  Complex eps;
  double residual;
};

Solve solve_at(const LFunctionSpec& L, int digits) {
  EvalOptions o;
  o.digits = digits;
  o.guard = 10;
  PrecisionScope scope(digits + 20);
  const Complex s0(Real(0.5), Real(0.37));
  const Complex s1(Real(0.71), Real(1.13));
  double tau0 = log10_gamma_scale(L, s0) - (digits + o.guard);
  o.x = 1.0;
  auto a1 = split_terms_target(L, s0, o, false, tau0);
  o.x = 1.23;
  auto a2 = split_terms_target(L, s0, o, false, tau0);
  Complex num = (a2.P - a2.polar) - (a1.P - a1.polar);
  Complex den = a1.Q - a2.Q;
  Solve out;
  out.eps = num / den;
  double tau1 = log10_gamma_scale(L, s1) - (digits + o.guard);
  o.x = 1.0;
  auto b1 = split_terms_target(L, s1, o, false, tau1);
  o.x = 0.87;
  auto b2 = split_terms_target(L, s1, o, false, tau1);
  Complex l1 = combine(b1, out.eps), l2 = combine(b2, out.eps);
  out.residual = (abs(l1 - l2) / max(abs(l1), Real(1))).log10_abs();
  if (!std::isfinite(out.residual)) out.residual = -(digits + o.guard);
  return out;
}

}  // namespace

RootNumberResult solve_root_number(LFunctionSpec& L, int digits) {
  RootNumberResult res;
  const int low = std::min(digits, 20);
  long best_q = -1;
  double best_r = 1e300;
  for (long q : divisors(L.conductor_bound)) {
    LFunctionSpec trial = L;
    trial.conductor = q;
    Solve sv = solve_at(trial, low);
    res.landscape.emplace_back(q, sv.residual);
    if (sv.residual < best_r) {
      best_r = sv.residual;
      best_q = q;
    }
  }
  if (best_r > -(low - 8)) {
    std::ostringstream os;
    os << "no consistent (epsilon, conductor): residual landscape";
    for (auto& [q, r] : res.landscape) os << " q=" << q << ":1e" << std::lround(r);
    throw RootNumberFailure(os.str());
  }
  L.conductor = best_q;
  Solve fin = solve_at(L, digits);
  if (fin.residual > -(digits - 10)) {
    throw RootNumberFailure("root number residual 1e" + std::to_string(std::lround(fin.residual)) +
                            " at conductor " + std::to_string(best_q));
  }
  PrecisionScope scope(digits + 20);
  Real mod = abs(fin.eps);
  if (abs(mod - Real(1)) > num::pow10(-(digits - 10)))
    throw RootNumberFailure("|epsilon| = " + mod.to_string(20) + " is not 1");
  Complex eps = fin.eps / mod;
  if (L.self_dual()) {
    Real dp = abs(eps - Complex(1)), dm = abs(eps + Complex(1));
    Real tol = num::pow10(-(digits - 10));
    if (dp < tol)
      eps = Complex(1);
    else if (dm < tol)
      eps = Complex(-1);
    else
      throw RootNumberFailure("self-dual L-function with epsilon = " + eps.to_string(20) + " not in {+1, -1}");
  }
  L.root_number = eps;
  L.conductor_confirmed = true;
  res.epsilon = eps;
  res.conductor = best_q;
  res.residual = fin.residual;
  return res;
}

double fe_residual(const LFunctionSpec& L, const Complex& s, int digits, double x_dual) {
  if (!L.root_number) throw std::logic_error("fe_residual: root number unknown");
  EvalOptions o;
  o.digits = digits;
  PrecisionScope scope(digits + 40);
  double tau = log10_gamma_scale(L, s) - 3 - (digits + o.guard);
  auto a = split_terms_target(L, s, o, false, tau);
  o.x = x_dual;
  auto b = split_terms_target(L, Complex(1) - s, o, true, tau);
  Complex eps = *L.root_number;
  Complex l1 = combine(a, eps), l2 = combine(b, conj(eps));
  double r = (abs(l1 - eps * l2) / max(abs(l1), Real(1))).log10_abs();
  return std::isfinite(r) ? r : -(digits + o.guard);
}

std::vector<Complex> probe_points(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(-0.5, 1.5), t(-3.0, 3.0);
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) {
    double a = sig(rng), b = t(rng);
    if (std::abs(b) < 0.05) b += 0.1;
    out.emplace_back(a, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const LFunctionSpec& L) {
  nlohmann::json j;
  j["id"] = L.id;
  j["degree"] = L.degree;
  j["motivic_weight"] = L.motivic_weight;
  j["conductor"] = L.conductor;
  j["conductor_bound"] = L.conductor_bound;
  j["conductor_confirmed"] = L.conductor_confirmed;
  j["gamma"] = arch::to_json(L.gamma);
  j["terms"] = L.coeffs ? L.coeffs->available() : 0;
  j["self_dual"] = L.self_dual();
  if (L.root_number) {
    j["root_number"] = {{"re", L.root_number->re.to_string()}, {"im", L.root_number->im.to_string()}};
  } else {
    j["root_number"] = "unknown";
  }
  j["omitted_primes"] = L.omitted_primes;
  j["provenance"] = L.provenance;
  return j;
}

nlohmann::json to_json(const EvalResult& r, const std::string& spec_id, int digits) {
  nlohmann::json j;
  j["spec_id"] = spec_id;
  j["s"] = {{"re", r.s.re.to_string(digits)}, {"im", r.s.im.to_string(digits)}};
  j["precision"] = digits;
  j["value_re"] = r.value.re.to_string(digits);
  j["value_im"] = r.value.im.to_string(digits);
  j["full_value_re"] = r.full_value.re.to_string(digits);
  j["full_value_im"] = r.full_value.im.to_string(digits);
  j["completed_re"] = r.completed.re.to_string(digits);
  j["completed_im"] = r.completed.im.to_string(digits);
  j["certified_digits"] = r.certified_digits;
  j["residuals"] = {{"functional_equation_log10", r.fe_residual}, {"term_doubling_log10", r.doubling_residual}};
  j["terms"] = r.terms;
  j["work_digits"] = r.work_digits;
  j["nodes"] = r.nodes;
  return j;
}

}  // namespace critval::eval
