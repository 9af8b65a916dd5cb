#include "critval/exact/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace critval::exact {

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const QPoly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return i;
  return -1;
}

int degree(const ZPoly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return i;
  return -1;
}

QPoly to_qpoly(const ZPoly& p) {
  QPoly out;
  for (const auto& c : p) out.emplace_back(c);
  trim(out);
  return out;
}

QPoly poly_add(const QPoly& a, const QPoly& b) {
  QPoly out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  trim(out);
  return out;
}

QPoly poly_sub(const QPoly& a, const QPoly& b) {
  QPoly out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  trim(out);
  return out;
}

QPoly poly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  trim(out);
  return out;
}

void poly_divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
  int db = degree(b);
  if (db < 0) throw std::domain_error("poly_divmod: division by zero polynomial");
  r = a;
  trim(r);
  int da = degree(r);
  q.assign(da >= db ? da - db + 1 : 0, mpq_class(0));
  while ((da = degree(r)) >= db) {
    mpq_class c = r[da] / b[db];
    q[da - db] = c;
    for (int i = 0; i <= db; ++i) r[da - db + i] -= c * b[i];
    r[da] = 0;
    trim(r);
  }
  trim(q);
}

QPoly poly_gcdex(const QPoly& a, const QPoly& b, QPoly& s) {
  QPoly r0 = a, r1 = b;
  QPoly s0{mpq_class(1)}, s1{};
  trim(r0);
  trim(r1);
  while (degree(r1) >= 0) {
    QPoly q, r;
    poly_divmod(r0, r1, q, r);
    QPoly s2 = poly_sub(s0, poly_mul(q, s1));
    r0 = r1;
    r1 = r;
    s0 = s1;
    s1 = s2;
  }
  int d = degree(r0);
  if (d >= 0) {
    mpq_class lead = r0[d];
    for (auto& c : r0) c /= lead;
    for (auto& c : s0) c /= lead;
  }
  s = s0;
  return r0;
}

mpq_class poly_eval(const QPoly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly charpoly(const std::vector<std::vector<mpq_class>>& a) {
  // Faddeev–LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
  const std::size_t n = a.size();
  QPoly c(n + 1);
  c[n] = 1;
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::vector<mpq_class>> next(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        mpq_class acc = 0;
        for (std::size_t l = 0; l < n; ++l) acc += a[i][l] * m[l][j];
        next[i][j] = acc;
      }
      next[i][i] += c[n - k + 1];
    }
    mpq_class tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * next[l][i];
    c[n - k] = -tr / mpq_class(static_cast<long>(k));
    m = std::move(next);
  }
  return c;
}

ZPoly parse_zpoly(const std::string& text) {
  std::istringstream in(text);
  ZPoly out;
  std::string tok;
  while (in >> tok) {
    mpz_class z;
    if (z.set_str(tok, 10) != 0) throw std::invalid_argument("bad integer coefficient '" + tok + "'");
    out.push_back(z);
  }
  return out;
}

std::string format_zpoly(const ZPoly& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += p[i].get_str();
  }
  return out;
}

}  // namespace critval::exact
