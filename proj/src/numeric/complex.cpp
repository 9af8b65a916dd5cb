#include "critval/numeric/complex.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace critval::num {

Complex Complex::i() { return {Real(0), Real(1)}; }

Complex Complex::unit(const Real& theta) { return {cos(theta), sin(theta)}; }

Complex Complex::root_of_unity(long k, long m) {
  k %= m;
  if (k < 0) k += m;
  if (k == 0) return Complex(1);
  if (2 * k == m) return Complex(-1);
  if (4 * k == m) return {Real(0), Real(1)};
  if (4 * k == 3 * m) return {Real(0), Real(-1)};
  // A little extra precision so the reduction 2πk/m is clean.
  Real theta;
  {
    PrecisionScope scope = PrecisionScope::bits(working_bits() + 16);
    theta = const_pi() * (2 * k) / m;
  }
  Complex z = unit(theta);
  z.round_to(working_bits());
  return z;
}

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}
Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}
Complex& Complex::operator*=(const Real& o) {
  re *= o;
  im *= o;
  return *this;
}
Complex& Complex::operator/=(const Real& o) {
  re /= o;
  im /= o;
  return *this;
}

void Complex::round_to(mpfr_prec_t bits) {
  re.round_to(bits);
  im.round_to(bits);
}

std::string Complex::to_string(int digits) const {
  std::string s = re.to_string(digits);
  if (im.sign() >= 0) s += "+";
  return s + im.to_string(digits) + "i";
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }

Complex operator*(const Complex& a, const Complex& b) {
  Real rr;
  Real ii;
  mpfr_fmms(rr.raw(), a.re.raw(), b.re.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_fmma(ii.raw(), a.re.raw(), b.im.raw(), a.im.raw(), b.re.raw(), MPFR_RNDN);
  return {rr, ii};
}

Complex operator/(const Complex& a, const Complex& b) {
  Real d = norm(b);
  Complex n = a * conj(b);
  return {n.re / d, n.im / d};
}

Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return b * a; }
Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
Complex operator*(const Complex& a, long b) { return {a.re * b, a.im * b}; }
Complex operator/(const Complex& a, long b) { return {a.re / b, a.im / b}; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Real norm(const Complex& z) {
  Real r;
  mpfr_fmma(r.raw(), z.re.raw(), z.re.raw(), z.im.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

Real abs(const Complex& z) {
  Real r;
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex exp(const Complex& z) {
  Real m = exp(z.re);
  Real s;
  Real c;
  mpfr_sin_cos(s.raw(), c.raw(), z.im.raw(), MPFR_RNDN);
  return {m * c, m * s};
}

Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

Complex sqrt(const Complex& z) {
  if (z.is_zero()) return Complex(0);
  Real r = abs(z);
  Real a = sqrt((r + abs(z.re)) / 2);
  if (z.re.sign() >= 0) return {a, z.im / (a * 2)};
  Real b = z.im.sign() < 0 ? -a : a;
  return {abs(z.im) / (a * 2), b};
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1);
  Complex base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Complex pow(const Complex& z, const Complex& w) {
  if (z.is_zero()) return Complex(0);
  return exp(w * log(z));
}

Complex pow(const Real& x, const Complex& w) { return exp(w * log(x)); }

Complex sin(const Complex& z) {
  // sin(a+ib) = sin a cosh b + i cos a sinh b
  Real s;
  Real c;
  mpfr_sin_cos(s.raw(), c.raw(), z.re.raw(), MPFR_RNDN);
  Real sh;
  Real ch;
  mpfr_sinh_cosh(sh.raw(), ch.raw(), z.im.raw(), MPFR_RNDN);
  return {s * ch, c * sh};
}

const mpq_class& bernoulli(int n) {
  static std::mutex mu;
  static std::vector<mpq_class> table{mpq_class(1)};
  std::lock_guard<std::mutex> lock(mu);
  if (n < 0) throw std::invalid_argument("bernoulli: negative index");
  // sum_{j=0}^{m} C(m+1, j) B_j = 0
  while (static_cast<int>(table.size()) <= n) {
    int m = static_cast<int>(table.size());
    if (m > 1 && (m & 1)) {
      table.emplace_back(0);
      continue;
    }
    mpq_class acc = 0;
    mpz_class binom = 1;  // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      if (!(j > 1 && (j & 1))) acc += mpq_class(binom) * table[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    table.emplace_back(-acc / mpq_class(m + 1));
  }
  return table[n];
}

namespace {

// Stirling series for |z| large and Re z > 0.
Complex stirling(const Complex& z) {
  const mpfr_prec_t bits = working_bits();
  Complex result = (z - Complex(0.5)) * log(z) - z;
  result.re += log(const_pi() * 2) / 2;
  Complex zinv = Complex(1) / z;
  Complex zinv2 = zinv * zinv;
  Complex zpow = zinv;
  Real last_mag(INFINITY);
  for (int k = 1; k < 4 * bits; ++k) {
    Real coef(bernoulli(2 * k));
    coef /= static_cast<long>(2 * k) * (2 * k - 1);
    Complex term = zpow * coef;
    Real mag = abs(term);
    if (mag > last_mag) break;  // asymptotic series started to diverge
    result += term;
    if (mag.is_zero() || mag.log10_abs() < -static_cast<double>(bits) * 0.30103 - 2.0 +
                                                 abs(result).log10_abs())
      break;
    last_mag = mag;
    zpow *= zinv2;
  }
  return result;
}

}  // namespace

Complex lngamma(const Complex& z) {
  const mpfr_prec_t bits = working_bits();
  if (z.re < Real(0.5)) {
    // Reflection: Γ(z)Γ(1−z) = π / sin(πz).
    Complex s = sin(z * const_pi());
    if (s.is_zero()) throw std::domain_error("lngamma: pole");
    return log(Complex(const_pi()) / s) - lngamma(Complex(1) - z);
  }
  PrecisionScope scope = PrecisionScope::bits(bits + 20);
  const double r0 = 0.12 * static_cast<double>(bits) + 4.0;
  double zr = z.re.to_double();
  double zi = z.im.to_double();
  long shift = 0;
  while ((zr + shift) * (zr + shift) + zi * zi < r0 * r0) ++shift;
  Complex w = z;
  Complex prod(1);
  for (long j = 0; j < shift; ++j) {
    prod *= w;
    w.re += Real(1);
  }
  Complex out = stirling(w);
  if (shift > 0) out -= log(prod);
  out.round_to(bits);
  return out;
}

Complex gamma(const Complex& z) {
  if (z.im.is_zero()) return Complex(gamma(z.re));
  return exp(lngamma(z));
}

Complex poly_eval(const std::vector<Complex>& coeffs, const Complex& z) {
  Complex acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<Complex> poly_roots(const std::vector<mpz_class>& coeffs_in) {
  std::vector<mpz_class> coeffs = coeffs_in;
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  if (coeffs.size() < 2) return {};
  const int deg = static_cast<int>(coeffs.size()) - 1;
  const mpfr_prec_t bits = working_bits();

  std::vector<Complex> roots;
  {
    PrecisionScope scope = PrecisionScope::bits(bits + 64);
    std::vector<Complex> p;
    for (const auto& c : coeffs) p.emplace_back(Real(c));
    std::vector<Complex> dp;
    for (int i = 1; i <= deg; ++i) dp.push_back(p[i] * static_cast<long>(i));
    auto monic_div = [&](const Complex& x) { return poly_eval(p, x) / poly_eval(dp, x); };

    // Cauchy bound for the initial circle.
    Real bound(0);
    Real lead = abs(p[deg].re);
    for (int i = 0; i < deg; ++i) bound = max(bound, abs(p[i].re) / lead);
    bound += Real(1);
    for (int i = 0; i < deg; ++i) {
      Real theta = const_pi() * 2 * (i + 0.25) / deg + Real(0.4);
      roots.push_back(Complex::unit(theta) * bound);
    }
    const double stop = -static_cast<double>(bits + 32) * 0.30103;
    for (int iter = 0; iter < 2000; ++iter) {
      double worst = -INFINITY;
      for (int i = 0; i < deg; ++i) {
        Complex ratio = monic_div(roots[i]);
        Complex rep(0);
        for (int j = 0; j < deg; ++j)
          if (j != i) rep += Complex(1) / (roots[i] - roots[j]);
        Complex corr = ratio / (Complex(1) - ratio * rep);
        roots[i] -= corr;
        double rel = abs(corr).log10_abs() - std::max(0.0, abs(roots[i]).log10_abs());
        worst = std::max(worst, rel);
      }
      if (worst < stop) break;
    }
    // Snap tiny imaginary parts to zero for real roots.
    for (auto& r : roots) {
      if (r.im.log10_abs() < -static_cast<double>(bits) * 0.30103 * 0.75 +
                                 std::max(0.0, abs(r).log10_abs()))
        r.im = Real(0);
    }
  }
  const double tie = -static_cast<double>(bits) * 0.30103 * 0.5;
  std::sort(roots.begin(), roots.end(), [&](const Complex& a, const Complex& b) {
    Real d = a.re - b.re;
    if (d.log10_abs() > tie + std::max(0.0, abs(a.re).log10_abs())) return a.re < b.re;
    return a.im < b.im;
  });
  for (auto& r : roots) r.round_to(bits);
  return roots;
}

}  // namespace critval::num
