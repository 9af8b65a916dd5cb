#pragma once

// Reference computations used only by the tests.  Each one avoids the code
// path it is compared against.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace oracle {

/// τ(1..N) from Δ = (η³)^8 with Jacobi's η³ = Σ (−1)^k (2k+1) q^{k(k+1)/2}.
inline std::vector<mpz_class> ramanujan_tau(std::size_t N) {
  // η³/q^{1/8} as a sparse list of (exponent, coefficient).
  std::vector<std::pair<std::size_t, long>> sparse;
  for (long k = 0;; ++k) {
    std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
    if (e > N) break;
    sparse.push_back({e, (k % 2 ? -1 : 1) * (2 * k + 1)});
  }
  std::vector<mpz_class> acc(N, 0);  // coefficient of q^j, j < N
  acc[0] = 1;
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<mpz_class> next(N, 0);
    for (std::size_t j = 0; j < N; ++j) {
      if (acc[j] == 0) continue;
      for (const auto& [e, c] : sparse) {
        if (j + e >= N) break;
        next[j + e] += acc[j] * c;
      }
    }
    acc.swap(next);
  }
  // Δ = q·(η³/q^{1/8})^8, so τ(n) = acc[n−1].
  std::vector<mpz_class> tau(N + 1, 0);
  for (std::size_t n = 1; n <= N; ++n) tau[n] = acc[n - 1];
  return tau;
}

/// σ_k(n) by trial division.
inline mpz_class sigma(long k, long n) {
  mpz_class s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) {
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k));
      s += p;
    }
  return s;
}

inline long gcd(long a, long b) {
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

/// Kronecker symbol (d/n) for n > 0, by quadratic reciprocity.
inline int kronecker(long d, long n) {
  int r = 1;
  while (n % 2 == 0) {
    n /= 2;
    long m8 = ((d % 8) + 8) % 8;
    if (m8 == 0 || m8 == 2 || m8 == 4 || m8 == 6) return 0;
    if (m8 == 3 || m8 == 5) r = -r;
  }
  long a = ((d % n) + n) % n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      if (n % 8 == 3 || n % 8 == 5) r = -r;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) r = -r;
    a %= n;
  }
  return n == 1 ? r : 0;
}

}  // namespace oracle
