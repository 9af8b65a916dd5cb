#include "critval/numeric/series.hpp"

#include <stdexcept>

namespace critval::num {

Series series_mul(const Series& a, const Series& b, std::size_t len) {
  Series out(len, Real(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Series series_inv(const Series& a, std::size_t len) {
  if (a.empty() || a[0].is_zero()) throw std::domain_error("series_inv: zero constant term");
  Series out(len, Real(0));
  Real inv0 = Real(1) / a[0];
  if (len == 0) return out;
  out[0] = inv0;
  for (std::size_t n = 1; n < len; ++n) {
    Real acc(0);
    for (std::size_t k = 1; k <= n && k < a.size(); ++k) acc += a[k] * out[n - k];
    out[n] = -acc * inv0;
  }
  return out;
}

Series series_exp(const Series& a, std::size_t len) {
  Series out(len, Real(0));
  if (len == 0) return out;
  out[0] = a.empty() ? Real(1) : exp(a[0]);
  for (std::size_t n = 1; n < len; ++n) {
    Real acc(0);
    for (std::size_t k = 1; k <= n && k < a.size(); ++k)
      acc += a[k] * out[n - k] * static_cast<long>(k);
    out[n] = acc / static_cast<long>(n);
  }
  return out;
}

Laurent laurent_mul(const Laurent& a, const Laurent& b, std::size_t len) {
  return {a.val + b.val, series_mul(a.c, b.c, len)};
}

namespace {

// lnΓ(x1 + δ) − lnΓ(x1) for x1 ∈ {1/2, 1}.
Series lngamma_base(bool half, std::size_t len) {
  Series g(len, Real(0));
  if (len > 1) {
    g[1] = -const_euler();
    if (half) g[1] -= const_log2() * 2;
  }
  for (std::size_t j = 2; j < len; ++j) {
    Real z = zeta(j);
    if (half) z *= pow(Real(2), static_cast<long>(j)) - Real(1);
    if (j & 1) z = -z;
    g[j] = z / static_cast<long>(j);
  }
  return g;
}

}  // namespace

Laurent gamma_laurent(long twice_x0, std::size_t len) {
  const bool half = (twice_x0 % 2) != 0;
  const long x1_twice = half ? 1 : 2;
  // Base expansion Γ(x1 + δ), with x1 = x1_twice / 2.
  Series base = series_exp(lngamma_base(half, len), len);
  if (half) {
    Real sp = sqrt(const_pi());
    for (auto& c : base) c *= sp;
  }
  Laurent out{0, base};
  if (twice_x0 >= x1_twice) {
    // Γ(x0+δ) = Γ(x1+δ) ∏_{j=0}^{K-1} (x1 + j + δ)
    for (long t = x1_twice; t < twice_x0; t += 2) {
      Series lin{Real(t) / 2, Real(1)};
      out.c = series_mul(out.c, lin, len);
    }
    return out;
  }
  // Γ(x0+δ) = Γ(x1+δ) / ∏_{j=0}^{K-1} (x0 + j + δ)
  Series denom{Real(1)};
  for (long t = twice_x0; t < x1_twice; t += 2) {
    if (t == 0) {
      out.val -= 1;
      continue;
    }
    Series lin{Real(t) / 2, Real(1)};
    denom = series_mul(denom, lin, len);
  }
  out.c = series_mul(out.c, series_inv(denom, len), len);
  return out;
}

}  // namespace critval::num
