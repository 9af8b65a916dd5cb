#pragma once

// Exact integer power series multiplied with multi-prime NTT and CRT.

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace critval::exact {

using ZSeries = std::vector<mpz_class>;

/// a·b truncated to `len` coefficients.  Exact for any input sizes: the
/// number of NTT primes is chosen from a coefficient-size bound.
ZSeries series_mul(const ZSeries& a, const ZSeries& b, std::size_t len);

/// Schoolbook product, used as a test oracle and for short inputs.
ZSeries series_mul_naive(const ZSeries& a, const ZSeries& b, std::size_t len);

/// Σ_{n≥1} σ_{k−1}(n) q^n scaled to the normalized Eisenstein series
/// E_k = 1 + c_k Σ σ_{k−1}(n) q^n for k ∈ {4, 6}.
ZSeries eisenstein(int k, std::size_t len);

/// Δ = (E_4^3 − E_6^2)/1728.
ZSeries delta_series(std::size_t len);

}  // namespace critval::exact
