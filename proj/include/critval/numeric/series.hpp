#pragma once

// Truncated real power series and Laurent expansions of Γ at half-integers.

#include "critval/numeric/real.hpp"

#include <vector>

namespace critval::num {

/// Coefficients c_0, c_1, ... of a truncated power series.
using Series = std::vector<Real>;

Series series_mul(const Series& a, const Series& b, std::size_t len);
/// 1/a; requires a[0] != 0.
Series series_inv(const Series& a, std::size_t len);
/// exp(a), truncated to `len` terms.
Series series_exp(const Series& a, std::size_t len);

/// δ^val · Σ c_i δ^i.
struct Laurent {
  int val = 0;
  Series c;
};

Laurent laurent_mul(const Laurent& a, const Laurent& b, std::size_t len);

/// Laurent expansion of Γ(x0 + δ) to `len` coefficients, where 2·x0 = twice_x0
/// is an integer.  Non-positive integers give a simple pole.
Laurent gamma_laurent(long twice_x0, std::size_t len);

}  // namespace critval::num
