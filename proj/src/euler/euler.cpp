#include "critval/euler/euler.hpp"

#include <numeric>
#include <stdexcept>

namespace critval::euler {

using exact::NumberField;
using num::Complex;
using num::PrecisionScope;

std::vector<long> primes_up_to(long n) {
  std::vector<long> out;
  if (n < 2) return out;
  std::vector<bool> comp(n + 1, false);
  for (long i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (long j = i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

SatakeData satake(const mf::Newform& f, long p, int digits) {
  if (f.level % p == 0)
    throw BadPrime("p = " + std::to_string(p) + " divides the level " + std::to_string(f.level) +
                   "; bad primes are omitted (partial L-function)");
  if (static_cast<std::size_t>(p) > f.coefficient_count())
    throw std::out_of_range("a_p not available for p = " + std::to_string(p));
  SatakeData s;
  s.prime = p;
  s.field = f.field;
  s.trace = f.a(p);
  s.det = f.hecke_det(p);
  s.weight = f.weight;
  PrecisionScope scope(digits);
  Complex ta = f.field->embed(s.trace, f.embedding);
  Complex td = f.field->embed(s.det, f.embedding);
  Complex root = num::sqrt(ta * ta - td * 4);
  s.alpha = (ta + root) / 2;
  s.beta = (ta - root) / 2;
  return s;
}

Twist Twist::from_character(const chars::DirichletCharacter& chi, long p) {
  auto e = chi.exp(p);
  if (!e) return vanishing();
  long g = std::gcd(*e, chi.order());
  return {chi.order() / g, *e / g, false};
}

Twist Twist::compose(const Twist& o) const {
  if (zero || o.zero) return vanishing();
  long L = std::lcm(order, o.order);
  long e = (exponent * (L / order) + o.exponent * (L / o.order)) % L;
  long g = std::gcd(e, L);
  if (e == 0) return none();
  return {L / g, e / g, false};
}

std::vector<Complex> EulerFactor::numeric(int embedding) const {
  if (twist.zero) return {Complex(1)};
  std::vector<Complex> out;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    Complex c = field->embed(coeffs[j], embedding);
    if (twist.exponent != 0) c = c * Complex::root_of_unity(twist.exponent * static_cast<long>(j), twist.order);
    out.push_back(c);
  }
  return out;
}

std::vector<FieldElem> EulerFactor::power_sums(int len) const {
  const auto& K = *field;
  std::vector<FieldElem> ps(len + 1, K.zero());
  const int D = static_cast<int>(coeffs.size()) - 1;
  for (int k = 1; k <= len; ++k) {
    FieldElem acc = K.zero();
    for (int i = 1; i < k && i <= D; ++i) acc = K.add(acc, K.mul(coeffs[i], ps[k - i]));
    if (k <= D) acc = K.add(acc, K.mul_int(coeffs[k], k));
    ps[k] = K.neg(acc);
  }
  return ps;
}

std::vector<FieldElem> EulerFactor::inverse_series(int len) const {
  const auto& K = *field;
  std::vector<FieldElem> h(len, K.zero());
  if (len == 0) return h;
  h[0] = K.one();
  const int D = static_cast<int>(coeffs.size()) - 1;
  for (int m = 1; m < len; ++m) {
    FieldElem acc = K.zero();
    for (int j = 1; j <= std::min(m, D); ++j)
      if (!coeffs[j].is_zero()) acc = K.add(acc, K.mul(coeffs[j], h[m - j]));
    h[m] = K.neg(acc);
  }
  return h;
}

namespace {

// Polynomial coefficients from power sums p_1..p_D (Newton's identities).
std::vector<FieldElem> from_power_sums(const NumberField& K, const std::vector<FieldElem>& ps, int D) {
  std::vector<FieldElem> c(D + 1, K.zero());
  c[0] = K.one();
  for (int k = 1; k <= D; ++k) {
    FieldElem acc = ps[k];
    for (int i = 1; i < k; ++i) acc = K.add(acc, K.mul(c[i], ps[k - i]));
    c[k] = K.neg(K.div_int(acc, k));
  }
  return c;
}

}  // namespace

EulerFactor sym_euler_factor_exact(long p, const exact::FieldPtr& Kp, const FieldElem& trace, const FieldElem& det,
                                   int r, Twist twist) {
  if (r < 0) throw std::invalid_argument("sym_euler_factor: r must be non-negative");
  const auto& K = *Kp;
  EulerFactor out;
  out.prime = p;
  out.field = Kp;
  out.twist = twist;
  if (twist.zero) {
    out.coeffs = {K.one()};
    return out;
  }
  const int D = r + 1;
  // s_j = α^j + β^j, δ^j.
  std::vector<FieldElem> s(D + 1, K.zero()), dj(D + 1, K.one());
  s[0] = K.from_int(2);
  if (D >= 1) s[1] = trace;
  for (int j = 1; j <= D; ++j) dj[j] = K.mul(dj[j - 1], det);
  for (int j = 2; j <= D; ++j) s[j] = K.sub(K.mul(trace, s[j - 1]), K.mul(det, s[j - 2]));
  // Power sum j of {α^{r−i}β^i} is h_r(α^j, β^j).
  std::vector<FieldElem> ps(D + 1, K.zero());
  for (int j = 1; j <= D; ++j) {
    FieldElem h0 = K.one(), h1 = s[j];
    if (r == 0) {
      ps[j] = h0;
      continue;
    }
    for (int m = 2; m <= r; ++m) {
      FieldElem h2 = K.sub(K.mul(s[j], h1), K.mul(dj[j], h0));
      h0 = std::move(h1);
      h1 = std::move(h2);
    }
    ps[j] = h1;
  }
  out.coeffs = from_power_sums(K, ps, D);
  return out;
}

EulerFactor sym_euler_factor(const SatakeData& s, int r, Twist twist) {
  return sym_euler_factor_exact(s.prime, s.field, s.trace, s.det, r, twist);
}

EulerFactor rankin_selberg_euler_factor(const EulerFactor& a, const EulerFactor& b) {
  if (a.prime != b.prime)
    throw std::invalid_argument("rankin_selberg_euler_factor: primes differ (" + std::to_string(a.prime) + " vs " +
                                std::to_string(b.prime) + ")");
  if (a.field != b.field) throw std::invalid_argument("rankin_selberg_euler_factor: coefficient fields differ");
  const auto& K = *a.field;
  EulerFactor out;
  out.prime = a.prime;
  out.field = a.field;
  out.twist = a.twist.compose(b.twist);
  if (out.twist.zero) {
    out.coeffs = {K.one()};
    return out;
  }
  const int D = a.degree() * b.degree();
  auto pa = a.power_sums(D);
  auto pb = b.power_sums(D);
  std::vector<FieldElem> ps(D + 1, K.zero());
  for (int k = 1; k <= D; ++k) ps[k] = K.mul(pa[k], pb[k]);
  out.coeffs = from_power_sums(K, ps, D);
  return out;
}

std::vector<Complex> rankin_selberg_numeric(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> poly{Complex(1)};
  for (const auto& x : a)
    for (const auto& y : b) {
      Complex g = x * y;
      std::vector<Complex> next(poly.size() + 1);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i];
        next[i + 1] -= poly[i] * g;
      }
      poly = std::move(next);
    }
  return poly;
}

EulerFactor scale_variable(const EulerFactor& f, const FieldElem& c) {
  const auto& K = *f.field;
  EulerFactor out = f;
  FieldElem cj = K.one();
  for (std::size_t j = 1; j < out.coeffs.size(); ++j) {
    cj = K.mul(cj, c);
    out.coeffs[j] = K.mul(out.coeffs[j], cj);
  }
  return out;
}

EulerFactor multiply(const EulerFactor& a, const EulerFactor& b) {
  if (a.prime != b.prime || a.field != b.field) throw std::invalid_argument("multiply: incompatible factors");
  if (a.twist.zero || b.twist.zero || a.twist.exponent != 0 || b.twist.exponent != 0)
    throw std::invalid_argument("multiply: twisted factors are not supported");
  const auto& K = *a.field;
  EulerFactor out;
  out.prime = a.prime;
  out.field = a.field;
  out.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, K.zero());
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j)
      out.coeffs[i + j] = K.add(out.coeffs[i + j], K.mul(a.coeffs[i], b.coeffs[j]));
  return out;
}

bool CGReport::all_pass() const {
  for (const auto& r : records)
    if (!r.equal) return false;
  return true;
}

CGReport verify_clebsch_gordan(const mf::Newform& f, int n, long prime_bound, bool assume_functoriality) {
  if (n < 1) throw std::invalid_argument("verify_clebsch_gordan: n must be >= 1");
  if (n > 4 && !assume_functoriality)
    throw FunctorialityRequired("Sym^" + std::to_string(n) +
                                " factors beyond n = 4 are conditional on functoriality; pass --assume-functoriality");
  CGReport rep;
  rep.form = f.label;
  rep.n = n;
  rep.prime_bound = prime_bound;
  const auto& K = *f.field;
  for (long p : primes_up_to(prime_bound)) {
    if (f.level % p == 0) {
      rep.skipped.push_back(p);
      continue;
    }
    if (static_cast<std::size_t>(p) > f.coefficient_count())
      throw std::out_of_range("not enough coefficients for p = " + std::to_string(p));
    const FieldElem& a = f.a(p);
    FieldElem det = f.hecke_det(p);
    EulerFactor lhs = rankin_selberg_euler_factor(sym_euler_factor_exact(p, f.field, a, det, n),
                                                  sym_euler_factor_exact(p, f.field, a, det, n - 1));
    EulerFactor rhs;
    rhs.prime = p;
    rhs.field = f.field;
    rhs.coeffs = {K.one()};
    for (int k = 1; k <= n; ++k) {
      EulerFactor piece = sym_euler_factor_exact(p, f.field, a, det, 2 * k - 1);
      rhs = multiply(rhs, scale_variable(piece, K.pow(det, static_cast<unsigned long>(n - k))));
    }
    CGRecord rec;
    rec.p = p;
    rec.degree_lhs = lhs.degree();
    rec.degree_rhs = rhs.degree();
    rec.equal = rec.degree_lhs == rec.degree_rhs;
    std::size_t len = std::max(lhs.coeffs.size(), rhs.coeffs.size());
    for (std::size_t j = 0; j < len; ++j) {
      FieldElem l = j < lhs.coeffs.size() ? lhs.coeffs[j] : K.zero();
      FieldElem r = j < rhs.coeffs.size() ? rhs.coeffs[j] : K.zero();
      if (l != r) {
        rec.equal = false;
        rec.first_mismatch = static_cast<int>(j);
        break;
      }
    }
    rep.records.push_back(rec);
  }
  return rep;
}

nlohmann::json to_json(const CGReport& r) {
  nlohmann::json j;
  j["form"] = r.form;
  j["n"] = r.n;
  j["prime_bound"] = r.prime_bound;
  j["all_pass"] = r.all_pass();
  j["skipped_primes"] = r.skipped;
  auto& arr = j["primes"] = nlohmann::json::array();
  for (const auto& rec : r.records) {
    nlohmann::json e;
    e["p"] = rec.p;
    e["degree_lhs"] = rec.degree_lhs;
    e["degree_rhs"] = rec.degree_rhs;
    e["equal"] = rec.equal;
    e["first_mismatch"] = rec.first_mismatch ? nlohmann::json(*rec.first_mismatch) : nlohmann::json(nullptr);
    arr.push_back(e);
  }
  return j;
}

}  // namespace critval::euler
