#include "critval/exact/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace critval::exact {

using num::Complex;
using num::PrecisionScope;
using num::Real;

bool FieldElem::operator==(const FieldElem& o) const {
  // Both sides are normalized, but compare by cross-multiplication so that
  // unnormalized scratch values also compare correctly.
  std::size_t n = std::max(num.size(), o.num.size());
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class a = i < num.size() ? num[i] : mpz_class(0);
    mpz_class b = i < o.num.size() ? o.num[i] : mpz_class(0);
    if (a * o.den != b * den) return false;
  }
  return true;
}

bool FieldElem::is_zero() const {
  return std::all_of(num.begin(), num.end(), [](const mpz_class& c) { return c == 0; });
}

mpq_class FieldElem::coord(std::size_t i) const {
  if (i >= num.size()) return 0;
  mpq_class q(num[i], den);
  q.canonicalize();
  return q;
}

NumberField::NumberField(ZPoly f) : f_(std::move(f)) {
  trim(f_);
  deg_ = exact::degree(f_);
  if (deg_ < 1) throw std::invalid_argument("number field: defining polynomial must have degree >= 1");
}

FieldPtr NumberField::rationals() {
  static const FieldPtr q = std::make_shared<const NumberField>(ZPoly{0, 1});
  return q;
}

void NumberField::normalize(FieldElem& a) const {
  a.num.resize(deg_);
  if (a.den < 0) {
    a.den = -a.den;
    for (auto& c : a.num) c = -c;
  }
  mpz_class g = a.den;
  for (const auto& c : a.num) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  }
  if (a.is_zero()) {
    a.den = 1;
    return;
  }
  if (g != 1) {
    for (auto& c : a.num) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(a.den.get_mpz_t(), a.den.get_mpz_t(), g.get_mpz_t());
  }
}

void NumberField::reduce(std::vector<mpz_class>& v, mpz_class& den) const {
  const mpz_class& lead = f_[deg_];
  for (int m = static_cast<int>(v.size()) - 1; m >= deg_; --m) {
    if (v[m] == 0) continue;
    mpz_class c = v[m];
    if (lead != 1) {
      for (int i = 0; i < m; ++i) v[i] *= lead;
      den *= lead;
    }
    for (int i = 0; i < deg_; ++i) v[m - deg_ + i] -= c * f_[i];
    v[m] = 0;
  }
  v.resize(deg_);
}

FieldElem NumberField::zero() const { return FieldElem{std::vector<mpz_class>(deg_), 1}; }

FieldElem NumberField::one() const { return from_int(1); }

FieldElem NumberField::from_int(const mpz_class& v) const {
  FieldElem e = zero();
  e.num[0] = v;
  return e;
}

FieldElem NumberField::from_rational(const mpq_class& v) const {
  FieldElem e = zero();
  e.num[0] = v.get_num();
  e.den = v.get_den();
  normalize(e);
  return e;
}

FieldElem NumberField::from_coords(const std::vector<mpq_class>& c) const {
  if (static_cast<int>(c.size()) > deg_) {
    QPoly p(c.begin(), c.end());
    QPoly q, r;
    poly_divmod(p, to_qpoly(f_), q, r);
    return from_coords(r);
  }
  mpz_class den = 1;
  for (const auto& x : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  FieldElem e = zero();
  e.den = den;
  for (std::size_t i = 0; i < c.size(); ++i) e.num[i] = c[i].get_num() * (den / c[i].get_den());
  normalize(e);
  return e;
}

FieldElem NumberField::gen() const {
  if (deg_ == 1) return from_rational(mpq_class(-f_[0], f_[1]));
  FieldElem e = zero();
  e.num[1] = 1;
  return e;
}

FieldElem NumberField::add(const FieldElem& a, const FieldElem& b) const {
  FieldElem e = zero();
  if (a.den == b.den) {
    for (int i = 0; i < deg_; ++i) e.num[i] = a.num[i] + b.num[i];
    e.den = a.den;
  } else {
    for (int i = 0; i < deg_; ++i) e.num[i] = a.num[i] * b.den + b.num[i] * a.den;
    e.den = a.den * b.den;
  }
  normalize(e);
  return e;
}

FieldElem NumberField::neg(const FieldElem& a) const {
  FieldElem e = a;
  for (auto& c : e.num) c = -c;
  return e;
}

FieldElem NumberField::sub(const FieldElem& a, const FieldElem& b) const { return add(a, neg(b)); }

FieldElem NumberField::mul(const FieldElem& a, const FieldElem& b) const {
  if (deg_ == 1) {
    FieldElem e{{a.num[0] * b.num[0]}, a.den * b.den};
    normalize(e);
    return e;
  }
  std::vector<mpz_class> prod(2 * deg_ - 1);
  for (int i = 0; i < deg_; ++i) {
    if (a.num[i] == 0) continue;
    for (int j = 0; j < deg_; ++j) prod[i + j] += a.num[i] * b.num[j];
  }
  mpz_class den = a.den * b.den;
  reduce(prod, den);
  FieldElem e{std::move(prod), den};
  normalize(e);
  return e;
}

FieldElem NumberField::mul_int(const FieldElem& a, const mpz_class& b) const {
  FieldElem e = a;
  for (auto& c : e.num) c *= b;
  normalize(e);
  return e;
}

FieldElem NumberField::div_int(const FieldElem& a, const mpz_class& b) const {
  if (b == 0) throw std::domain_error("field division by zero");
  FieldElem e = a;
  e.den *= b;
  normalize(e);
  return e;
}

FieldElem NumberField::inv(const FieldElem& a) const {
  if (a.is_zero()) throw std::domain_error("field inverse of zero");
  QPoly pa;
  for (int i = 0; i < deg_; ++i) pa.emplace_back(a.coord(i));
  trim(pa);
  QPoly s;
  QPoly g = poly_gcdex(pa, to_qpoly(f_), s);
  if (exact::degree(g) != 0) throw std::domain_error("field inverse: defining polynomial is reducible");
  return from_coords(s);
}

FieldElem NumberField::pow(const FieldElem& a, unsigned long e) const {
  FieldElem result = one();
  FieldElem base = a;
  while (e) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return result;
}

FieldElem NumberField::eval_poly(const QPoly& p, const FieldElem& x) const {
  FieldElem acc = zero();
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = add(mul(acc, x), from_rational(*it));
  return acc;
}

std::optional<mpq_class> NumberField::as_rational(const FieldElem& a) const {
  for (int i = 1; i < deg_; ++i)
    if (a.num[i] != 0) return std::nullopt;
  return a.coord(0);
}

const std::vector<Complex>& NumberField::roots_at(mpfr_prec_t bits) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = root_cache_.find(bits);
  if (it != root_cache_.end()) return it->second;
  PrecisionScope scope = PrecisionScope::bits(bits);
  std::vector<Complex> roots;
  if (deg_ == 1) {
    roots.emplace_back(Real(mpq_class(-f_[0], f_[1])));
  } else {
    roots = num::poly_roots(f_);
  }
  return root_cache_.emplace(bits, std::move(roots)).first->second;
}

std::vector<Complex> NumberField::embeddings() const { return roots_at(num::working_bits()); }

Complex NumberField::embed(const FieldElem& a, int embedding) const {
  const mpfr_prec_t bits = num::working_bits();
  if (deg_ == 1) {
    mpq_class q(a.num[0], a.den);
    return Complex(Real(q));
  }
  // Guard bits against cancellation among the power-basis terms.
  const auto& r0 = roots_at(bits);
  double lg_theta = std::max(0.0, num::abs(r0.at(embedding)).log10_abs() * 3.3219280948873623);
  double top = 0;
  for (int i = 0; i < deg_; ++i)
    top = std::max(top, static_cast<double>(mpz_sizeinbase(a.num[i].get_mpz_t(), 2)) + i * lg_theta);
  double extra = top - static_cast<double>(mpz_sizeinbase(a.den.get_mpz_t(), 2)) + 64;
  mpfr_prec_t wb = bits + static_cast<mpfr_prec_t>(std::max(32.0, extra));
  wb = (wb + 127) / 128 * 128;  // few distinct root-cache entries
  Complex out;
  {
    PrecisionScope scope = PrecisionScope::bits(wb);
    const auto& roots = roots_at(wb);
    const Complex& theta = roots.at(embedding);
    Complex acc(0);
    for (int i = deg_ - 1; i >= 0; --i) acc = acc * theta + Complex(Real(a.num[i]));
    out = acc / Real(a.den);
  }
  out.round_to(bits);
  return out;
}

namespace {

// Best rational approximation with bounded denominator via continued
// fractions; nullopt if none fits within tol.
std::optional<mpq_class> rationalize(const Real& x, const mpz_class& max_den, const Real& tol) {
  Real y = x;
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 2000; ++it) {
    mpz_class a = num::to_mpz_rounded(num::floor(y));
    mpz_class p2 = a * p1 + p0;
    mpz_class q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    mpq_class cand(p1, q1);
    cand.canonicalize();
    if (num::abs(x - Real(cand)) <= tol) return cand;
    Real frac = y - Real(a);
    if (frac.is_zero()) break;
    y = Real(1) / frac;
  }
  return std::nullopt;
}

}  // namespace

bool NumberField::is_irreducible() const {
  if (deg_ == 1) return true;
  mpz_class maxc = 0;
  for (const auto& c : f_) maxc = std::max(maxc, mpz_class(abs(c)));
  mpfr_prec_t bits = 128 + 4 * static_cast<mpfr_prec_t>(mpz_sizeinbase(maxc.get_mpz_t(), 2));
  PrecisionScope scope = PrecisionScope::bits(bits);
  const auto roots = roots_at(bits);
  const QPoly fq = to_qpoly(f_);
  const int n = deg_;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    int size = __builtin_popcount(mask);
    if (2 * size > n) continue;
    std::vector<Complex> g{Complex(Real(f_[n]))};
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      std::vector<Complex> next(g.size() + 1);
      for (std::size_t j = 0; j < g.size(); ++j) {
        next[j + 1] += g[j];
        next[j] -= g[j] * roots[i];
      }
      g = std::move(next);
    }
    QPoly cand;
    bool integral = true;
    for (const auto& c : g) {
      mpz_class r = num::to_mpz_rounded(c.re);
      Real err = num::abs(c.re - Real(r)) + num::abs(c.im);
      if (err > Real(0.25)) {
        integral = false;
        break;
      }
      cand.emplace_back(r);
    }
    if (!integral) continue;
    trim(cand);
    if (exact::degree(cand) < 1) continue;
    QPoly q, r;
    poly_divmod(fq, cand, q, r);
    if (exact::degree(r) < 0) return false;
  }
  return true;
}

std::vector<QPoly> NumberField::automorphisms() const {
  std::vector<QPoly> out{QPoly{mpq_class(0), mpq_class(1)}};
  if (deg_ == 1) {
    out = {QPoly{mpq_class(-f_[0], f_[1])}};
    return out;
  }
  if (deg_ > 6) return out;
  mpz_class maxc = 0;
  for (const auto& c : f_) maxc = std::max(maxc, mpz_class(abs(c)));
  const mpfr_prec_t bits = 256 + 8 * static_cast<mpfr_prec_t>(mpz_sizeinbase(maxc.get_mpz_t(), 2));
  PrecisionScope scope = PrecisionScope::bits(bits);
  const auto roots = roots_at(bits);
  const int n = deg_;
  const QPoly fq = to_qpoly(f_);
  mpz_class max_den = 1;
  mpz_ui_pow_ui(max_den.get_mpz_t(), 2, static_cast<unsigned long>(bits / 3));
  Real tol = num::ldexp(Real(1), -static_cast<long>(bits * 3 / 4));

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<QPoly> found;
  do {
    if (perm[0] == 0) continue;  // identity handled separately
    // Solve Σ_k g_k r_i^k = r_{perm[i]} by Gaussian elimination.
    std::vector<std::vector<Complex>> m(n, std::vector<Complex>(n + 1));
    for (int i = 0; i < n; ++i) {
      Complex p(1);
      for (int k = 0; k < n; ++k) {
        m[i][k] = p;
        p *= roots[i];
      }
      m[i][n] = roots[perm[i]];
    }
    bool singular = false;
    for (int col = 0; col < n && !singular; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (num::abs(m[r][col]) > num::abs(m[piv][col])) piv = r;
      if (m[piv][col].is_zero()) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[col]);
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        Complex factor = m[r][col] / m[col][col];
        for (int c = col; c <= n; ++c) m[r][c] -= factor * m[col][c];
      }
    }
    if (singular) continue;
    QPoly g;
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      Complex v = m[k][n] / m[k][k];
      if (num::abs(v.im) > tol * (Real(1) + num::abs(v.re))) {
        ok = false;
        break;
      }
      auto q = rationalize(v.re, max_den, tol * (Real(1) + num::abs(v.re)));
      if (!q) ok = false;
      else g.push_back(*q);
    }
    if (!ok) continue;
    trim(g);
    // Exact verification: f(g(θ)) ≡ 0 in the field.
    FieldElem img = eval_poly(g, gen());
    FieldElem val = eval_poly(fq, img);
    if (!val.is_zero()) continue;
    bool dup = false;
    for (const auto& h : found) dup = dup || h == g;
    if (!dup) found.push_back(g);
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

FieldElem NumberField::apply(const QPoly& sigma, const FieldElem& a) const {
  if (deg_ == 1) return a;
  QPoly pa;
  for (int i = 0; i < deg_; ++i) pa.emplace_back(a.coord(i));
  trim(pa);
  return eval_poly(pa, eval_poly(sigma, gen()));
}

std::string NumberField::format(const FieldElem& a) const {
  std::string out;
  for (int i = 0; i < deg_; ++i) {
    if (i) out += ' ';
    out += a.coord(i).get_str();
  }
  return out;
}

FieldElem NumberField::parse(const std::vector<std::string>& tokens) const {
  if (static_cast<int>(tokens.size()) != deg_)
    throw std::invalid_argument("expected " + std::to_string(deg_) + " coordinates, got " +
                                std::to_string(tokens.size()));
  std::vector<mpq_class> c;
  for (const auto& t : tokens) {
    mpq_class q;
    if (t.empty() || q.set_str(t, 10) != 0) throw std::invalid_argument("bad rational '" + t + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + t + "'");
    q.canonicalize();
    c.push_back(q);
  }
  return from_coords(c);
}

}  // namespace critval::exact
