#include "critval/characters/character.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace critval::chars {

using num::Complex;
using num::PrecisionScope;
using num::Real;

namespace {

long powmod(long b, long e, long m) {
  long r = 1 % m;
  b %= m;
  if (b < 0) b += m;
  while (e > 0) {
    if (e & 1) r = static_cast<long>((static_cast<__int128>(r) * b) % m);
    b = static_cast<long>((static_cast<__int128>(b) * b) % m);
    e >>= 1;
  }
  return r;
}

std::vector<std::pair<long, int>> factor(long n) {
  std::vector<std::pair<long, int>> out;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

long primitive_root_prime_power(long p, int e) {
  long phi_p = p - 1;
  auto fs = factor(phi_p);
  long g = 2;
  for (;; ++g) {
    bool ok = true;
    for (auto [f, _] : fs)
      if (powmod(g, phi_p / f, p) == 1) ok = false;
    if (ok) break;
  }
  if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
  return g;
}

// x ≡ r mod m1, x ≡ 1 mod m2, with coprime moduli.
long crt_lift(long r, long m1, long m2) {
  // x = 1 + m2·t, m2·t ≡ r − 1 mod m1
  long inv = 1;
  {
    long a = m2 % m1, mod = m1;
    long t0 = 0, t1 = 1, r0 = mod, r1 = a;
    while (r1 != 0) {
      long q = r0 / r1;
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    }
    inv = ((t0 % mod) + mod) % mod;
  }
  long t = (((r - 1) % m1 + m1) % m1) * inv % m1;
  return (1 + m2 * t) % (m1 * m2);
}

const std::vector<Complex>& root_table(long n) {
  thread_local std::map<std::pair<long, mpfr_prec_t>, std::vector<Complex>> cache;
  auto key = std::make_pair(n, num::working_bits());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<Complex> t;
  t.reserve(n);
  for (long j = 0; j < n; ++j) t.push_back(Complex::root_of_unity(j, n));
  return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace

std::shared_ptr<const UnitGroup> UnitGroup::get(long q) {
  if (q < 1) throw std::invalid_argument("modulus must be positive");
  static std::mutex mu;
  static std::map<long, std::shared_ptr<const UnitGroup>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;

  auto g = std::make_shared<UnitGroup>();
  g->modulus = q;
  for (auto [p, e] : factor(q)) {
    long pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    long rest = q / pe;
    if (p == 2) {
      if (e >= 2) {
        g->generators.push_back(crt_lift(pe - 1, pe, rest));
        g->orders.push_back(2);
      }
      if (e >= 3) {
        g->generators.push_back(crt_lift(5, pe, rest));
        g->orders.push_back(pe / 4);
      }
    } else {
      g->generators.push_back(crt_lift(primitive_root_prime_power(p, e), pe, rest));
      g->orders.push_back(pe / p * (p - 1));
    }
  }
  g->exponent = 1;
  for (long n : g->orders) g->exponent = std::lcm(g->exponent, n);

  g->dlog.assign(q, {});
  std::vector<std::pair<long, std::vector<long>>> elems{{1 % q, {}}};
  for (std::size_t i = 0; i < g->generators.size(); ++i) {
    std::vector<std::pair<long, std::vector<long>>> next;
    next.reserve(elems.size() * g->orders[i]);
    for (const auto& [a, v] : elems) {
      long cur = a;
      for (long l = 0; l < g->orders[i]; ++l) {
        auto w = v;
        w.push_back(l);
        next.emplace_back(cur, std::move(w));
        cur = cur * g->generators[i] % q;
      }
    }
    elems = std::move(next);
  }
  for (auto& [a, v] : elems) g->dlog[a] = std::move(v);
  if (q == 1) g->dlog[0] = {};
  cache.emplace(q, g);
  return g;
}

DirichletCharacter DirichletCharacter::trivial(long q) {
  auto grp = UnitGroup::get(q);
  return from_exponents(q, std::vector<long>(grp->generators.size(), 0));
}

DirichletCharacter DirichletCharacter::from_exponents(long q, const std::vector<long>& x) {
  DirichletCharacter c;
  c.q_ = q;
  c.group_ = UnitGroup::get(q);
  if (x.size() != c.group_->generators.size())
    throw std::invalid_argument("exponent vector has wrong length for modulus " + std::to_string(q));
  c.x_ = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long n = c.group_->orders[i];
    c.x_[i] = ((x[i] % n) + n) % n;
  }
  c.finish();
  return c;
}

void DirichletCharacter::finish() {
  const auto& g = *group_;
  const long L = g.exponent;
  std::vector<long> w(x_.size());
  long gg = L;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    w[i] = x_[i] * (L / g.orders[i]);
    gg = std::gcd(gg, w[i]);
  }
  m_ = L / gg;
  table_.assign(q_, -1);
  for (long a = 0; a < q_; ++a) {
    if (std::gcd(a, q_) != 1 && q_ != 1) continue;
    const auto& d = g.dlog[a];
    long e = 0;
    for (std::size_t i = 0; i < d.size(); ++i) e = (e + (w[i] / gg) * d[i]) % m_;
    table_[a] = e;
  }
  if (q_ == 1) table_[0] = 0;

  parity_ = 1;
  if (q_ > 2 && table_[q_ - 1] != 0) parity_ = -1;

  index_ = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) index_ = index_ * g.orders[i] + x_[i];

  conductor_ = q_;
  for (long c = 1; c < q_; ++c) {
    if (q_ % c) continue;
    bool ok = true;
    for (long a = 1; a < q_ && ok; a += c)
      if (table_[a] > 0) ok = false;
    if (ok) {
      conductor_ = c;
      break;
    }
  }
}

DirichletCharacter DirichletCharacter::from_values(long q, long m, const std::function<long(long)>& exp_of) {
  auto grp = UnitGroup::get(q);
  std::vector<long> x(grp->generators.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    long e = ((exp_of(grp->generators[i]) % m) + m) % m;
    long n = grp->orders[i];
    if ((e * n) % m != 0) throw std::invalid_argument("values do not define a character");
    x[i] = e * n / m;
  }
  DirichletCharacter c = from_exponents(q, x);
  // Check the remaining values agree (catches non-multiplicative input).
  for (long a = 1; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    long want = ((exp_of(a) % m) + m) % m;
    long have = c.table_[a] * (m / c.m_);
    if (m % c.m_ != 0 || want != have) throw std::invalid_argument("values do not define a character");
  }
  return c;
}

DirichletCharacter DirichletCharacter::parse(const std::string& label) {
  if (label == "trivial") return trivial(1);
  auto dot = label.find('.');
  if (dot == std::string::npos) throw std::invalid_argument("bad character label '" + label + "'");
  long q = 0;
  try {
    std::size_t used = 0;
    q = std::stol(label.substr(0, dot), &used);
    if (used != dot) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad character label '" + label + "'");
  }
  if (q < 1) throw std::invalid_argument("bad character label '" + label + "'");
  std::string rest = label.substr(dot + 1);
  if (rest == "triv") return trivial(q);
  long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stol(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad character label '" + label + "'");
  }
  auto grp = UnitGroup::get(q);
  long total = 1;
  for (long n : grp->orders) total *= n;
  if (idx < 0 || idx >= total)
    throw std::invalid_argument("character index out of range in '" + label + "'");
  std::vector<long> x(grp->orders.size());
  for (std::size_t i = x.size(); i-- > 0;) {
    x[i] = idx % grp->orders[i];
    idx /= grp->orders[i];
  }
  return from_exponents(q, x);
}

std::string DirichletCharacter::label() const {
  if (is_trivial()) return std::to_string(q_) + ".triv";
  return std::to_string(q_) + "." + std::to_string(index_);
}

std::optional<long> DirichletCharacter::exp(long a) const {
  long r = ((a % q_) + q_) % q_;
  if (table_[r] < 0) return std::nullopt;
  return table_[r];
}

Complex DirichletCharacter::value(long a) const {
  auto e = exp(a);
  if (!e) return Complex(0);
  return Complex::root_of_unity(*e, m_);
}

std::vector<DirichletCharacter> enumerate_characters(long q, std::optional<int> parity) {
  auto grp = UnitGroup::get(q);
  std::vector<DirichletCharacter> out;
  std::vector<long> x(grp->orders.size(), 0);
  for (;;) {
    auto c = DirichletCharacter::from_exponents(q, x);
    if (!parity || c.parity() == *parity) out.push_back(std::move(c));
    // Lexicographic increment, last generator fastest.
    std::size_t i = x.size();
    while (i > 0) {
      --i;
      if (++x[i] < grp->orders[i]) break;
      x[i] = 0;
      if (i == 0) return out;
    }
    if (x.empty()) return out;
  }
}

DirichletCharacter primitivize(const DirichletCharacter& chi) {
  const long c = chi.conductor();
  if (c == chi.modulus()) return chi;
  const long q = chi.modulus();
  return DirichletCharacter::from_values(c, chi.order(), [&](long b) {
    for (long a = b; a < b + c * q; a += c)
      if (std::gcd(a, q) == 1) return *chi.exp(a);
    throw std::logic_error("primitivize: no unit lift");
  });
}

DirichletCharacter character_product(const DirichletCharacter& a, const DirichletCharacter& b) {
  const long q = std::lcm(a.modulus(), b.modulus());
  const long m = std::lcm(a.order(), b.order());
  return DirichletCharacter::from_values(q, m, [&](long x) {
    return *a.exp(x) * (m / a.order()) + *b.exp(x) * (m / b.order());
  });
}

Complex gauss_sum(const DirichletCharacter& chi, int digits) {
  DirichletCharacter p = primitivize(chi);
  const long c = p.conductor();
  if (c == 1) return Complex(1);
  Complex acc;
  {
    PrecisionScope scope(digits + 10);
    const auto& zc = root_table(c);
    const auto& zm = root_table(p.order());
    for (long a = 1; a < c; ++a) {
      auto e = p.exp(a);
      if (!e) continue;
      acc += zm[*e] * zc[a];
    }
  }
  PrecisionScope out_scope(digits);
  acc.round_to(num::working_bits());
  return acc;
}

Real gauss_sum_product_check(const DirichletCharacter& chi1, const DirichletCharacter& chi2, int digits) {
  if (!chi1.is_primitive() || !chi2.is_primitive())
    throw std::invalid_argument("gauss_sum_product_check: characters must be primitive");
  const long c1 = chi1.conductor();
  const long c2 = chi2.conductor();
  if (std::gcd(c1, c2) != 1)
    throw std::invalid_argument("gauss_sum_product_check: conductors " + std::to_string(c1) + " and " +
                                std::to_string(c2) + " are not coprime; the identity does not hold in general");
  PrecisionScope scope(digits + 10);
  DirichletCharacter prod = character_product(chi1, chi2);
  Complex lhs = gauss_sum(prod, digits + 10);
  Complex rhs = chi1.value(c2) * chi2.value(c1) * gauss_sum(chi1, digits + 10) * gauss_sum(chi2, digits + 10);
  return num::abs(lhs - rhs);
}

}  // namespace critval::chars
